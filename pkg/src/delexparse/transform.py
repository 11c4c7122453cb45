"""Tree normalization: annotation stripping, delexicalization, binarization.

The chart decoder consumes right-branching binary trees in which unary
chains are collapsed into ``+``-joined labels and surplus children hang
under intermediate nodes with the reserved empty label.  ``debinarize``
inverts both devices exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .treebank import ExtendedTag, TaggedSentence, Tree

EMPTY_LABEL = "∅"
CHAIN_SEPARATOR = "+"

_COINDEX_RE = re.compile(r"=\d+$")
_LEADING_FILLER_RE = re.compile(r"[0-9.]+")


@dataclass(frozen=True)
class TransformConfig:
    """Knobs for annotation stripping and delexicalization."""

    edge_separator: str = "-"
    trace_label: str = "-NONE-"
    trace_token_patterns: tuple[str, ...] = ("*T*", "*")  # token prefixes
    morph_separator: str = "."
    keep_morphology: bool = True

    def __post_init__(self):
        for name in ("edge_separator", "morph_separator"):
            value = getattr(self, name)
            if len(value) != 1 or not value.isprintable() or value.isspace():
                raise ValueError(f"{name} must be one printable character")
        if self.edge_separator == self.morph_separator:
            raise ValueError("edge and morphology separators must differ")


def _clean_label(label: str, cfg: TransformConfig) -> str:
    cut = label.find(cfg.edge_separator)
    if cut > 0:
        label = label[:cut]
    stripped = _COINDEX_RE.sub("", label)
    return stripped if stripped else label


def _is_trace(node: Tree, cfg: TransformConfig) -> bool:
    if node.label == cfg.trace_label:
        return True
    if len(node.children) == 1:
        token = node.children[0].token
        return any(token.startswith(p) for p in cfg.trace_token_patterns)
    return False


def strip_annotations(tree: Tree, cfg: TransformConfig = TransformConfig()) -> Tree:
    """Remove edge labels, coindexation suffixes, and trace subtrees.

    Phrase labels are truncated at the first edge separator and trailing
    ``=N`` indices are dropped; preterminal labels are left untouched.
    Trace preterminals are deleted together with any ancestors that end up
    childless.  Raises ValueError if nothing remains below the root.
    """

    def walk(node: Tree) -> Tree | None:
        if node.is_leaf:
            return node
        if node.is_preterminal:
            return None if _is_trace(node, cfg) else node
        children = [c for c in (walk(child) for child in node.children) if c is not None]
        if not children:
            return None
        return Tree.node(_clean_label(node.label, cfg), children)

    result = walk(tree)
    if result is None:
        raise ValueError("empty after stripping")
    return result


def delexicalize_tree(tree: Tree, cfg: TransformConfig = TransformConfig()) -> Tree:
    """Overwrite each leaf with its preterminal's extended tag.

    The preterminal keeps only the POS part of its label; the leaf token
    becomes the full serialized tag, or just the POS when morphology is
    dropped.  Tree shape is unchanged.
    """

    def walk(node: Tree) -> Tree:
        if node.is_leaf:
            raise ValueError(f"leaf {node.token!r} has no preterminal parent")
        if node.is_preterminal:
            if len(node.children) != 1:
                raise ValueError(
                    f"preterminal {node.label!r} has {len(node.children)} children")
            try:
                tag = ExtendedTag.parse(node.label, cfg.morph_separator)
            except ValueError as exc:
                raise ValueError(
                    f"preterminal label {node.label!r} is not an extended tag") from exc
            token = tag.serialized(cfg.morph_separator) if cfg.keep_morphology else tag.pos
            return Tree.node(tag.pos, [Tree.leaf(token)])
        return Tree.node(node.label, [walk(c) for c in node.children])

    return walk(tree)


def delexicalize_sentence(sentence: TaggedSentence,
                          cfg: TransformConfig = TransformConfig()) -> list[str]:
    """Replace each token with its serialized tag (or POS without morphology)."""
    if cfg.keep_morphology:
        return [tag.serialized(cfg.morph_separator) for tag in sentence.tags]
    return [tag.pos for tag in sentence.tags]


def _check_reserved(tree: Tree) -> None:
    if tree.is_leaf or tree.is_preterminal:
        return
    if EMPTY_LABEL in tree.label or CHAIN_SEPARATOR in tree.label:
        raise ValueError(f"label {tree.label!r} uses a reserved character")
    for child in tree.children:
        _check_reserved(child)


def _fold_right(children: list[Tree]) -> list[Tree]:
    if len(children) <= 2:
        return children
    return [children[0], Tree.node(EMPTY_LABEL, _fold_right(children[1:]))]


def binarize(tree: Tree) -> Tree:
    """Right-branching binarization with unary chain collapse.

    A node with more than two children keeps its first child and pushes the
    rest under an intermediate empty-label node, recursively.  Chains of
    unary phrase nodes merge into one node with ``+``-joined labels; a
    phrase node directly over a preterminal is kept as is.
    """
    _check_reserved(tree)

    def walk(node: Tree) -> Tree:
        if node.is_leaf or node.is_preterminal:
            return node
        label = node.label
        while (len(node.children) == 1
               and not node.children[0].is_leaf
               and not node.children[0].is_preterminal):
            node = node.children[0]
            label = label + CHAIN_SEPARATOR + node.label
        children = _fold_right([walk(c) for c in node.children])
        return Tree.node(label, children)

    return walk(tree)


def debinarize(tree: Tree) -> Tree:
    """Invert :func:`binarize`: splice empty nodes, expand ``+`` chains."""
    if not tree.is_leaf and not tree.is_preterminal and tree.label == EMPTY_LABEL:
        raise ValueError("cannot splice an empty-label node at the root")

    def walk(node: Tree) -> Tree:
        if node.is_leaf or node.is_preterminal:
            return node
        children: list[Tree] = []
        for child in node.children:
            done = walk(child)
            if not done.is_leaf and not done.is_preterminal and done.label == EMPTY_LABEL:
                children.extend(done.children)
            else:
                children.append(done)
        parts = node.label.split(CHAIN_SEPARATOR)
        result = Tree.node(parts[-1], children)
        for part in reversed(parts[:-1]):
            result = Tree.node(part, [result])
        return result

    return walk(tree)


def relabel_preterminals(tree: Tree, labels: list[str]) -> Tree:
    """Replace preterminal labels left to right with the given tag labels.

    Decoded trees carry whatever the model embedded at the preterminals;
    when the true tags are known (gold or predicted by a tagger), this
    restores them so the output looks like a normal treebank tree.
    """
    position = 0

    def walk(node: Tree) -> Tree:
        nonlocal position
        if node.is_leaf:
            return node
        if node.is_preterminal:
            if position >= len(labels):
                raise ValueError(
                    f"tree has more preterminals than the {len(labels)} labels given")
            relabeled = Tree.node(labels[position], list(node.children))
            position += 1
            return relabeled
        return Tree.node(node.label, [walk(c) for c in node.children])

    result = walk(tree)
    if position != len(labels):
        raise ValueError(
            f"tree has {position} preterminals but {len(labels)} labels given")
    return result


def relexicalize_tree(tree: Tree, tokens: list[str]) -> Tree:
    """Replace leaf tokens left to right with the given surface tokens."""
    position = 0

    def walk(node: Tree) -> Tree:
        nonlocal position
        if node.is_leaf:
            if position >= len(tokens):
                raise ValueError(
                    f"tree has more leaves than the {len(tokens)} tokens given")
            leaf = Tree.leaf(tokens[position])
            position += 1
            return leaf
        return Tree.node(node.label, [walk(c) for c in node.children])

    result = walk(tree)
    if position != len(tokens):
        raise ValueError(f"tree has {position} leaves but {len(tokens)} tokens given")
    return result


def _drop_leaf(tree: Tree, target: int) -> Tree | None:
    """Remove the leaf at index ``target`` plus any ancestors left empty."""
    position = 0

    def walk(node: Tree) -> Tree | None:
        nonlocal position
        if node.is_leaf:
            position += 1
            return None if position - 1 == target else node
        children = [c for c in (walk(child) for child in node.children) if c is not None]
        if not children:
            return None
        return Tree.node(node.label, children)

    return walk(tree)


def filter_target_treebank(trees: list[Tree], latin_lexicon: set[str],
                           ) -> tuple[list[Tree], list[str]]:
    """Clean an evaluation treebank; returns (kept trees, report lines).

    Drops trees covering fewer than two leaves or failing well-formedness,
    drops trees where more than half of the tokens appear in the given
    Latin lexicon, and deletes a leading leaf made of digits and periods.
    The <2-leaf criterion is this toolkit's reading of "incomplete" trees.
    """
    from .treebank import well_formedness_problems

    kept: list[Tree] = []
    report: list[str] = []
    for index, tree in enumerate(trees):
        tokens = tree.leaf_tokens()
        if len(tokens) < 2:
            report.append(f"tree {index}: dropped (covers {len(tokens)} leaves)")
            continue
        problems = well_formedness_problems(tree)
        if problems:
            report.append(f"tree {index}: dropped (ill-formed: {problems[0]})")
            continue
        latin = sum(1 for t in tokens if t in latin_lexicon)
        if 2 * latin > len(tokens):
            report.append(
                f"tree {index}: dropped (mostly Latin: {latin}/{len(tokens)} tokens)")
            continue
        if _LEADING_FILLER_RE.fullmatch(tokens[0]):
            trimmed = _drop_leaf(tree, 0)
            if trimmed is None:
                report.append(f"tree {index}: dropped (empty after trimming)")
                continue
            report.append(f"tree {index}: removed leading token {tokens[0]!r}")
            tree = trimmed
        kept.append(tree)
    return kept, report
