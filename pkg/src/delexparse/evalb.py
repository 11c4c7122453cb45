"""Labeled bracket scoring: precision, recall, F1, and complete match.

POS labels and punctuation are disregarded: leaves under punctuation
preterminals are removed and the remaining leaves reindexed before spans
are collected, and preterminals never contribute spans.  Spans form a
multiset, so duplicate brackets from unary chains each count.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple

from .treebank import Tree

DEFAULT_PUNCTUATION = frozenset({"$,", "$.", "$("})


class LabeledSpan(NamedTuple):
    start: int
    end: int
    label: str


@dataclass(frozen=True)
class EvalConfig:
    punctuation_tags: frozenset[str] = DEFAULT_PUNCTUATION
    ignore_labels: frozenset[str] = frozenset()
    label_equivalences: Mapping[str, str] = field(default_factory=dict)
    include_root: bool = True


@dataclass(frozen=True)
class EvalResult:
    recall: float
    precision: float
    fscore: float
    complete_match: float
    matched: int
    gold_total: int
    pred_total: int
    exact_trees: int
    total_trees: int


@dataclass(frozen=True)
class SentenceScore:
    index: int
    gold_spans: int
    pred_spans: int
    matched: int
    exact: bool
    skipped: bool = False


def _spans_and_length(tree: Tree, cfg: EvalConfig) -> tuple[Counter, int]:
    spans: Counter = Counter()

    def walk(node: Tree, i: int, is_root: bool) -> int:
        if node.is_leaf:
            return i + 1
        if node.is_preterminal:
            if node.label in cfg.punctuation_tags:
                return i
            return i + len(node.children)
        j = i
        for child in node.children:
            j = walk(child, j, False)
        if j > i and (cfg.include_root or not is_root):
            label = cfg.label_equivalences.get(node.label, node.label)
            if label not in cfg.ignore_labels:
                spans[LabeledSpan(i, j, label)] += 1
        return j

    length = walk(tree, 0, True)
    return spans, length


def extract_eval_spans(tree: Tree, cfg: EvalConfig = EvalConfig()) -> Counter:
    """Multiset of scoring spans after punctuation removal and reindexing."""
    spans, _ = _spans_and_length(tree, cfg)
    return spans


def _percent(numerator: float, denominator: float) -> float:
    return 100.0 * numerator / denominator if denominator else 0.0


def _fscore(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def score_corpus_detailed(gold: list[Tree], pred: list[Tree],
                          cfg: EvalConfig = EvalConfig(),
                          ) -> tuple[EvalResult, list[SentenceScore]]:
    """Score a parallel corpus; pairs with unequal post-punctuation leaf
    counts are skipped and reported rather than failing the run."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold trees vs {len(pred)} predicted")
    rows: list[SentenceScore] = []
    matched = gold_total = pred_total = exact = scored = 0
    for index, (g, p) in enumerate(zip(gold, pred)):
        g_spans, g_len = _spans_and_length(g, cfg)
        p_spans, p_len = _spans_and_length(p, cfg)
        if g_len != p_len:
            rows.append(SentenceScore(index, 0, 0, 0, False, skipped=True))
            continue
        hits = sum((g_spans & p_spans).values())
        is_exact = g_spans == p_spans
        rows.append(SentenceScore(index, sum(g_spans.values()),
                                  sum(p_spans.values()), hits, is_exact))
        matched += hits
        gold_total += sum(g_spans.values())
        pred_total += sum(p_spans.values())
        exact += is_exact
        scored += 1
    precision = _percent(matched, pred_total)
    recall = _percent(matched, gold_total)
    result = EvalResult(
        recall=recall,
        precision=precision,
        fscore=_fscore(precision, recall),
        complete_match=_percent(exact, scored),
        matched=matched,
        gold_total=gold_total,
        pred_total=pred_total,
        exact_trees=exact,
        total_trees=scored,
    )
    return result, rows


def score_corpus(gold: list[Tree], pred: list[Tree],
                 cfg: EvalConfig = EvalConfig()) -> EvalResult:
    result, _ = score_corpus_detailed(gold, pred, cfg)
    return result


def format_summary(result: EvalResult) -> str:
    """Space-separated ``R P F CM`` with two decimals."""
    return (f"{result.recall:.2f} {result.precision:.2f} "
            f"{result.fscore:.2f} {result.complete_match:.2f}")


def write_report(result: EvalResult, rows: list[SentenceScore],
                 path: str | Path) -> None:
    """Summary percentages, then one tab-separated line per sentence."""
    lines = [
        f"recall\t{result.recall:.2f}",
        f"precision\t{result.precision:.2f}",
        f"fscore\t{result.fscore:.2f}",
        f"complete_match\t{result.complete_match:.2f}",
    ]
    for row in rows:
        if row.skipped:
            lines.append(f"{row.index}\t-\t-\t-\tskip")
        else:
            lines.append(f"{row.index}\t{row.gold_spans}\t{row.pred_spans}"
                         f"\t{row.matched}\t{int(row.exact)}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
