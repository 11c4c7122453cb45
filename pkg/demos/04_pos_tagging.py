"""Training and applying the baseline POS tagger.

The averaged perceptron predicts full extended tags (POS plus morphology
as one label) with greedy left-to-right decoding.  It stands in wherever
no externally tagged corpus is available.
"""

from delexparse import (ExtendedTag, TaggedSentence, tag_sentence,
                        tagger_accuracy, train_tagger)

def sentence(*pairs):
    tokens, tags = zip(*pairs)
    return TaggedSentence(tokens, tuple(ExtendedTag.parse(t) for t in tags))

corpus = [
    sentence(("der", "ART.Nom.Sg.Masc"), ("hunt", "NA.Nom.Sg.Masc"),
             ("louft", "VVFIN.3.Sg")),
    sentence(("diu", "DDART.Nom.Sg.Fem"), ("frouwe", "NA.Nom.Sg.Fem"),
             ("lachet", "VVFIN.3.Sg")),
    sentence(("der", "ART.Nom.Sg.Masc"), ("man", "NA.Nom.Sg.Masc"),
             ("singet", "VVFIN.3.Sg")),
    sentence(("diu", "DDART.Nom.Sg.Fem"), ("katze", "NA.Nom.Sg.Fem"),
             ("slafet", "VVFIN.3.Sg")),
]

model = train_tagger(corpus, epochs=5, seed=10)
print(f"tag inventory ({len(model.tag_inventory)}):", model.tag_inventory)

# Seen sentences come back with their training tags.
predictions = [tag_sentence(model, list(s.tokens)) for s in corpus]
print("training accuracy:", tagger_accuracy(corpus, predictions))

# Unseen tokens are handled by affix and shape features plus context.
unseen = tag_sentence(model, ["der", "vogel", "vliuget"])
for token, tag in zip(unseen.tokens, unseen.tags):
    print(f"  {token:8s} -> {tag.serialized()}")
