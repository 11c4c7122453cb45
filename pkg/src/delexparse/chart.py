"""Exact CKY decoding over span label scores.

A sentence of n tokens is parsed by filling a triangular chart over the
fenceposts 0..n.  Every span picks its best label independently of the
split decision; label index 0 is the reserved empty label, which the root
span is never allowed to take.  Ties break toward the lowest label index
and then the smallest split point, so decoding is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform import EMPTY_LABEL, debinarize
from .treebank import ExtendedTag, Tree


@dataclass
class Chart:
    """Dynamic-program tables; entries are valid for 0 <= i < j <= n."""

    best_score: np.ndarray  # (n+1, n+1) float
    best_label: np.ndarray  # (n+1, n+1) int, argmax label per span
    best_split: np.ndarray  # (n+1, n+1) int, valid for j - i >= 2


def _check_scores(scores: np.ndarray) -> int:
    if scores.ndim != 3 or scores.shape[0] + 1 != scores.shape[1]:
        raise ValueError(f"bad score tensor shape {scores.shape}")
    n = scores.shape[0]
    if n < 1:
        raise ValueError("cannot decode an empty sentence")
    return n


def build_chart(scores: np.ndarray) -> Chart:
    """Fill the chart bottom-up; label and split choices are independent."""
    n = _check_scores(scores)
    label_best = scores.max(axis=2)
    label_arg = scores.argmax(axis=2)
    best = np.zeros((n + 1, n + 1))
    split = np.full((n + 1, n + 1), -1, dtype=np.int64)
    labels = np.zeros((n + 1, n + 1), dtype=np.int64)
    labels[:n, :] = label_arg
    for i in range(n):
        best[i, i + 1] = label_best[i, i + 1]
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            inner = np.arange(i + 1, j)
            totals = best[i, inner] + best[inner, j]
            k = int(totals.argmax())
            best[i, j] = label_best[i, j] + totals[k]
            split[i, j] = i + 1 + k
    return Chart(best_score=best, best_label=labels, best_split=split)


def _root_choice(scores: np.ndarray, chart: Chart) -> tuple[int, float]:
    """Best non-empty root label and the resulting total tree score."""
    n = scores.shape[0]
    root_label = 1 + int(scores[0, n, 1:].argmax())
    split_part = chart.best_score[0, n] - scores[0, n].max()
    return root_label, float(scores[0, n, root_label] + split_part)


def decode_spans(scores: np.ndarray) -> tuple[float, list[tuple[int, int, int]]]:
    """Best tree as (total score, all bracketing spans with label indices).

    The span list covers every span of the decoded binary bracketing,
    including those assigned the empty label.
    """
    n = _check_scores(scores)
    chart = build_chart(scores)
    root_label, total = _root_choice(scores, chart)
    spans: list[tuple[int, int, int]] = []
    stack: list[tuple[int, int, int]] = [(0, n, root_label)]
    while stack:
        i, j, label = stack.pop()
        spans.append((i, j, label))
        if j - i >= 2:
            k = int(chart.best_split[i, j])
            right = (k, j, int(chart.best_label[k, j]))
            left = (i, k, int(chart.best_label[i, k]))
            stack.append(right)
            stack.append(left)
    return total, spans


def _preterminal(tag: ExtendedTag, morph_separator: str) -> Tree:
    return Tree.node(tag.pos, [Tree.leaf(tag.serialized(morph_separator))])


def cky_decode(scores: np.ndarray, label_inventory: list[str],
               tags: list[ExtendedTag], morph_separator: str = ".") -> Tree:
    """Return the highest-scoring binarized tree for the given tags.

    Preterminals are attached from the tags: the POS part labels the
    preterminal and the serialized tag becomes the leaf token.  The root
    span always takes a non-empty label.
    """
    n = _check_scores(scores)
    if len(tags) != n:
        raise ValueError(f"{len(tags)} tags for {n} positions")
    if scores.shape[2] != len(label_inventory):
        raise ValueError("label inventory does not match score tensor")
    if label_inventory[0] != EMPTY_LABEL:
        raise ValueError("label inventory must reserve index 0 for the empty label")
    chart = build_chart(scores)
    root_label, _ = _root_choice(scores, chart)

    def build(i: int, j: int, label: int) -> Tree:
        if j - i == 1:
            node = _preterminal(tags[i], morph_separator)
        else:
            k = int(chart.best_split[i, j])
            left = build(i, k, int(chart.best_label[i, k]))
            right = build(k, j, int(chart.best_label[k, j]))
            node = Tree.node(EMPTY_LABEL, [left, right])
        if label != 0:
            if j - i == 1:
                node = Tree.node(label_inventory[label], [node])
            else:
                node = Tree.node(label_inventory[label], node.children)
        return node

    return build(0, n, root_label)


def tree_spans(tree: Tree) -> tuple[list[tuple[int, int, str]], int]:
    """Labeled spans of a binarized tree (leaf count as second value).

    Preterminals contribute no span; intermediate empty-label nodes do.
    """
    spans: list[tuple[int, int, str]] = []

    def walk(node: Tree, i: int) -> int:
        if node.is_leaf:
            return i + 1
        if node.is_preterminal:
            return i + len(node.children)
        j = i
        for child in node.children:
            j = walk(child, j)
        spans.append((i, j, node.label))
        return j

    n = walk(tree, 0)
    return spans, n


def hamming_augment(n: int, num_labels: int,
                    gold_spans: list[tuple[int, int, int]]) -> np.ndarray:
    """Cost tensor adding 1 to every span labeling that disagrees with gold.

    Gold's labeling is completed with the empty label on spans it does not
    bracket, so picking the empty label off the gold bracketing costs
    nothing; any other disagreement costs 1.
    """
    augment = np.ones((n, n + 1, num_labels))
    augment[:, :, 0] = 0.0
    for i, j, label in gold_spans:
        if label != 0:
            augment[i, j, 0] = 1.0
        augment[i, j, label] = 0.0
    return augment


def spans_to_indices(spans: list[tuple[int, int, str]],
                     label_inventory: list[str]) -> list[tuple[int, int, int]]:
    index = {label: k for k, label in enumerate(label_inventory)}
    out = []
    for i, j, label in spans:
        if label not in index:
            raise ValueError(f"label {label!r} not in inventory")
        out.append((i, j, index[label]))
    return out


def loss_augmented_decode(scores: np.ndarray, gold: Tree,
                          label_inventory: list[str],
                          tags: list[ExtendedTag]) -> Tree:
    """Decode under scores plus the Hamming cost against the gold tree."""
    n = _check_scores(scores)
    gold_spans, leaves = tree_spans(gold)
    if leaves != n:
        raise ValueError(f"gold tree covers {leaves} leaves, scores cover {n}")
    augment = hamming_augment(n, len(label_inventory),
                              spans_to_indices(gold_spans, label_inventory))
    return cky_decode(scores + augment, label_inventory, tags)


def decode_tree(scores: np.ndarray, label_inventory: list[str],
                tags: list[ExtendedTag], morph_separator: str = ".") -> Tree:
    """Decode and debinarize in one step (the surfaced pipeline form)."""
    return debinarize(cky_decode(scores, label_inventory, tags, morph_separator))
