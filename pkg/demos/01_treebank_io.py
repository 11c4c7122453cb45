"""Reading and writing the three on-disk formats.

Bracketed treebanks (.brackets), tab-separated tagged corpora (.tags), and
sectioned tag map tables (.tagmap).
"""

from delexparse import (parse_bracketed, read_tag_map, read_tagged_corpus,
                        serialize_tree, split_treebank)

# A bracketed treebank is one or more parenthesized trees.  Input may span
# several lines per tree; output is always one line per tree.
text = """
(S (NP-SB (ART.Nom.Sg.Masc der) (NN.Nom.Sg.Masc Mann))
   (VVFIN.3.Sg.Pres lacht)
   ($. .))
(S (NP-SB (ART.Nom.Sg.Fem die) (NN.Nom.Sg.Fem Frau)) (VVFIN.3.Sg.Pres singt))
"""
trees = parse_bracketed(text)
print(f"parsed {len(trees)} trees")
for tree in trees:
    print(" ", serialize_tree(tree))
    print("   tokens:", tree.leaf_tokens())

# Literal parentheses are escaped Penn-style on write and decoded on read.
bracket_tree = parse_bracketed("(S ($-LRB- -LRB-) (NN Klammer))")[0]
print("decoded punctuation tag:", bracket_tree.children[0].label)
print("re-encoded:", serialize_tree(bracket_tree))

# Corpus splitting is positional: first N trees train, the rest dev.
train, dev = split_treebank(trees, 1)
print(f"split: {len(train)} train / {len(dev)} dev")

# Tagged corpora pair each token with a serialized extended tag.
tagged = read_tagged_corpus("diu\tDDART.Nom.Sg.Fem\nfrouwe\tNA.Nom.Sg.Fem\n\n")
sentence = tagged[0]
print("tagged sentence:", list(zip(sentence.tokens,
                                   (t.serialized() for t in sentence.tags))))

# Tag maps are sectioned TSV; POS targets may carry features.
table = read_tag_map("[pos]\nDDART\tART\nVAPS\tADJD.Pos\n[features]\n")
print("pos_map:", {k: v.serialized() for k, v in table.pos_map.items()})
