"""Training the span parser on the bundled toy treebank.

The model embeds factored tags (POS plus summed morphological features),
encodes them with self-attention, scores every span against every label,
and trains with a structured hinge loss against loss-augmented CKY
decodes.  The toy treebank is memorizable, so a short run reaches
perfect training F1.
"""

from delexparse import ModelConfig, TrainConfig, parse_corpus, serialize_tree, train
from delexparse.data import toy_treebank_path
from delexparse.trainer import tree_tag_sequence
from delexparse.transform import (TransformConfig, binarize, debinarize,
                                  delexicalize_tree, strip_annotations)
from delexparse.treebank import read_treebank

raw = read_treebank(toy_treebank_path())
print(f"toy treebank: {len(raw)} trees")
print("sample:", serialize_tree(raw[0]))

cfg = TransformConfig()
trees = [binarize(delexicalize_tree(strip_annotations(t, cfg), cfg)) for t in raw]

# Desk-scale model (the default); 30 epochs are plenty here.
params = train(trees, trees, ModelConfig(), TrainConfig(epochs=30),
               log_path="toy_train.log")
print("label inventory:", params.labels)

tags = [tree_tag_sequence(t) for t in trees]
predictions = parse_corpus(params, tags)
gold = [debinarize(t) for t in trees]
exact = sum(g == p for g, p in zip(gold, predictions))
print(f"exactly reproduced {exact}/{len(gold)} training trees")
print("a prediction:", serialize_tree(predictions[0]))
print("training log tail:")
for line in open("toy_train.log").read().splitlines()[-3:]:
    print("  epoch\tloss\tdev_F1 =", line)
