"""Normalizing trees for the chart parser.

Three steps take a raw annotated tree to parser-ready form: stripping
(edge labels, coindexation, traces), delexicalization (leaves overwritten
by their extended tags), and right-branching binarization.
"""

from delexparse import (TransformConfig, binarize, debinarize,
                        delexicalize_tree, parse_bracketed, serialize_tree,
                        strip_annotations)

cfg = TransformConfig()

raw = parse_bracketed(
    "(S (NP-SB=1 (ART.Nom.Pl.Fem Die) (NN.Nom.Pl.Fem Frauen))"
    " (VVFIN.3.Pl.Pres singen)"
    " (NP-OA (-NONE- *T*1)))")[0]
print("raw:         ", serialize_tree(raw))

stripped = strip_annotations(raw, cfg)
print("stripped:    ", serialize_tree(stripped))
# NP-SB=1 became NP; the trace subtree disappeared entirely

delexed = delexicalize_tree(stripped, cfg)
print("delexicalized:", serialize_tree(delexed))
# leaves now carry the full tag, preterminals only the POS part

plain = TransformConfig(keep_morphology=False)
print("no morphology:", serialize_tree(delexicalize_tree(stripped, plain)))

# Binarization: surplus children hang under reserved empty-label nodes and
# unary phrase chains collapse into one +-joined label.
wide = parse_bracketed("(S (A a) (B b) (C c) (D d))")[0]
binary = binarize(wide)
print("binarized:   ", serialize_tree(binary))
print("restored:    ", serialize_tree(debinarize(binary)))

chain = parse_bracketed("(S (VP (VVFIN lacht)))")[0]
print("unary chain: ", serialize_tree(binarize(chain)), "->",
      serialize_tree(debinarize(binarize(chain))))
