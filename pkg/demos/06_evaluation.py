"""Bracket scoring: precision, recall, F1, and complete match.

Scoring disregards POS labels and punctuation: punctuation leaves are
removed (with reindexing) and preterminals never contribute spans.
Duplicate brackets from unary chains count as a multiset.
"""

from delexparse import extract_eval_spans, parse_bracketed, score_corpus
from delexparse.evalb import format_summary, score_corpus_detailed

gold = parse_bracketed(
    "(S (NP (ART der) (NN Mann)) (VVFIN lacht) ($. .))"
    "(S (NP (ART die) (NN Frau)) (VP (VVFIN singt) (ADV gern)))")
pred = parse_bracketed(
    "(S (NP (ART der) (NN Mann)) (VVFIN lacht) ($. .))"
    "(S (NP (ART die) (NN Frau)) (VVFIN singt) (ADV gern))")

for tree in gold:
    print("gold spans:", dict(extract_eval_spans(tree)))
for tree in pred:
    print("pred spans:", dict(extract_eval_spans(tree)))

result, rows = score_corpus_detailed(gold, pred)
print("summary (R P F CM):", format_summary(result))
for row in rows:
    print(f"  sentence {row.index}: gold {row.gold_spans} pred {row.pred_spans}"
          f" matched {row.matched} exact {row.exact}")

# Self-comparison is always perfect.
print("self comparison:", format_summary(score_corpus(gold, gold)))

# Punctuation never affects the outcome: the trailing ($. .) above was
# already invisible to the scorer.  POS labels are equally irrelevant:
relabeled = parse_bracketed(
    "(S (NP (X der) (X Mann)) (X lacht) ($. .))"
    "(S (NP (X die) (X Frau)) (VP (X singt) (X gern)))")
print("POS relabeled:  ", format_summary(score_corpus(gold, relabeled)))
