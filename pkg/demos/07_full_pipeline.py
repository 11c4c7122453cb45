"""The whole cross-lingual transfer pipeline on synthetic data.

A parser is trained on a synthetic "modern" treebank of tag sequences,
then applied zero-shot to a "historical" variant whose tag names differ:
tag the tokens, map the historical tags onto the modern inventory,
parse the delexicalized sequences, and score against the held-out gold
trees.  No historical tree is ever seen in training.
"""

import numpy as np

from delexparse import (ExtendedTag, ModelConfig, TagMapTable, TaggedSentence,
                        TrainConfig, map_sentence, parse_corpus, score_corpus,
                        tag_sentence, train, train_tagger)
from delexparse.evalb import format_summary
from delexparse.synthetic import morph_structure_treebank
from delexparse.transform import (TransformConfig, binarize, delexicalize_tree,
                                  relexicalize_tree, strip_annotations)

rng = np.random.default_rng(0)
cfg = TransformConfig()

# -- source side: train the delexicalized parser on modern trees ----------
modern = morph_structure_treebank(120, seed=7)
train_trees = [binarize(delexicalize_tree(strip_annotations(t, cfg), cfg))
               for t in modern[:96]]
parser = train(train_trees, train_trees, ModelConfig(), TrainConfig(epochs=40))

# -- target side: historical sentences with renamed tags ------------------
# The historical corpus uses its own tag names (NN -> NAH etc.); gold
# trees exist only for evaluation, never for training.
held_out = [strip_annotations(t, cfg) for t in modern[96:]]
rename = {"ART": "ARTH", "NN": "NAH", "VVFIN": "VFINH", "ADV": "AVH",
          "APPR": "APH"}

historical_tagged = []
for tree in held_out:
    tokens = tuple(tree.leaf_tokens())
    tags = tuple(ExtendedTag(rename[t.pos], t.features)
                 for t in (ExtendedTag.parse(p.label) for p in tree.preterminals()))
    historical_tagged.append(TaggedSentence(tokens, tags))

# A POS tagger for the historical language, trained on its tagged corpus
# (here: the same distribution; in practice a large tagged corpus).
tagger = train_tagger(historical_tagged, epochs=5, seed=10)

# The mapping table sends historical names back to the modern inventory.
table = TagMapTable(pos_map={h: ExtendedTag(m) for m, h in rename.items()},
                    feature_map={})

# -- zero-shot application: tag, map, parse, re-lexicalize ----------------
predictions = []
for sentence in historical_tagged:
    tagged = tag_sentence(tagger, list(sentence.tokens))
    mapped = map_sentence(tagged, table)
    tree = parse_corpus(parser, [list(mapped.tags)])[0]
    predictions.append(relexicalize_tree(tree, list(sentence.tokens)))

result = score_corpus(held_out, predictions)
print("zero-shot transfer (R P F CM):", format_summary(result))

# With gold historical tags instead of predicted ones the scores can only
# improve; any margin measures what tagger noise costs.  On this small
# closed vocabulary the tagger is perfect, so the two lines coincide.
gold_tag_predictions = []
for tree, sentence in zip(held_out, historical_tagged):
    mapped = map_sentence(sentence, table)
    parsed = parse_corpus(parser, [list(mapped.tags)])[0]
    gold_tag_predictions.append(relexicalize_tree(parsed, list(sentence.tokens)))
print("with gold tags        (R P F CM):",
      format_summary(score_corpus(held_out, gold_tag_predictions)))
