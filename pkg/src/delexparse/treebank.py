"""Reading and writing bracketed treebanks, tagged corpora, and tag map tables.

File formats:

* ``.brackets`` -- parenthesized trees, UTF-8, one tree per line on output;
  input may spread a tree over several lines.  Literal parentheses in labels
  and tokens are written as ``-LRB-`` / ``-RRB-`` and decoded on read.
* ``.tags`` -- one ``token<TAB>TAG.Feat1.Feat2`` line per token, sentences
  separated by a blank line.
* ``.tagmap`` -- sectioned TSV with ``[pos]`` and ``[features]`` sections,
  each line ``source<TAB>target``; ``#`` starts a comment line.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

log = logging.getLogger(__name__)

TAG_SEPARATOR = "."

_ESCAPES = (("(", "-LRB-"), (")", "-RRB-"))
_TOKEN_RE = re.compile(r"[()]|[^\s()]+")


class TreebankFormatError(ValueError):
    """Malformed treebank, tagged corpus, or tag map input.

    ``offset`` is a character offset into the input for bracketing errors;
    ``line`` is a 1-based line number for line-oriented formats.
    """

    def __init__(self, message: str, offset: int | None = None, line: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.offset = offset
        self.line = line


def escape_atom(text: str) -> str:
    for char, code in _ESCAPES:
        text = text.replace(char, code)
    return text


def unescape_atom(text: str) -> str:
    for char, code in _ESCAPES:
        text = text.replace(code, char)
    return text


@dataclass(frozen=True)
class Tree:
    """Rooted ordered tree; internal nodes carry labels, leaves carry tokens.

    A node is a leaf iff ``children`` is empty iff ``token`` is present.  For
    leaves, ``label`` equals the token.  A preterminal is an internal node
    all of whose children are leaves.
    """

    label: str
    children: tuple["Tree", ...] = ()
    token: str | None = None

    @staticmethod
    def leaf(token: str) -> "Tree":
        return Tree(token, (), token)

    @staticmethod
    def node(label: str, children: Iterable["Tree"]) -> "Tree":
        return Tree(label, tuple(children), None)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_preterminal(self) -> bool:
        return bool(self.children) and all(c.is_leaf for c in self.children)

    def leaf_tokens(self) -> list[str]:
        if self.is_leaf:
            return [self.token]
        out: list[str] = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.token)
            else:
                stack.extend(reversed(node.children))
        return out

    def preterminals(self) -> list["Tree"]:
        if self.is_leaf:
            return []
        if self.is_preterminal:
            return [self]
        out: list[Tree] = []
        for child in self.children:
            out.extend(child.preterminals())
        return out

    def __repr__(self) -> str:  # compact form, easier to read in test output
        if self.is_leaf:
            return self.token
        return "({} {})".format(self.label, " ".join(repr(c) for c in self.children))


def well_formedness_problems(tree: Tree) -> list[str]:
    """Return a list of violations of the well-formed tree shape.

    Well-formed means every leaf hangs under a preterminal with exactly one
    child.  Flat preterminals and bare leaves under phrase nodes are legal
    input (they occur in converted treebanks) but are reported here.
    """
    problems: list[str] = []

    def walk(node: Tree) -> None:
        if node.is_leaf:
            return
        if node.is_preterminal:
            if len(node.children) != 1:
                problems.append(
                    f"preterminal {node.label!r} has {len(node.children)} leaves")
            return
        for child in node.children:
            if child.is_leaf:
                problems.append(
                    f"leaf {child.token!r} has non-preterminal parent {node.label!r}")
            else:
                walk(child)

    if tree.is_leaf:
        problems.append("bare leaf as root")
    else:
        walk(tree)
    return problems


def scan_bracketed(text: str) -> tuple[list[Tree], list[str]]:
    """Parse all bracketed trees in ``text``; return (trees, diagnostics).

    Diagnostics report accepted-but-irregular structure (flat preterminals,
    leaves with non-leaf siblings).  Hard format problems raise
    :class:`TreebankFormatError` with a character offset.
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]
    trees: list[Tree] = []
    diagnostics: list[str] = []
    pos = 0

    def parse_node(i: int) -> tuple[Tree, int]:
        # tokens[i] is the "(" that opens this node
        open_offset = tokens[i][1]
        i += 1
        if i >= len(tokens):
            raise TreebankFormatError("unbalanced parentheses", offset=len(text))
        head, head_offset = tokens[i]
        if head == ")":
            raise TreebankFormatError("empty label", offset=head_offset)
        if head == "(":
            raise TreebankFormatError("missing label before '('", offset=head_offset)
        label = unescape_atom(head)
        i += 1
        children: list[Tree] = []
        while True:
            if i >= len(tokens):
                raise TreebankFormatError("unbalanced parentheses", offset=len(text))
            tok, offset = tokens[i]
            if tok == "(":
                child, i = parse_node(i)
                children.append(child)
            elif tok == ")":
                i += 1
                break
            else:
                children.append(Tree.leaf(unescape_atom(tok)))
                i += 1
        if not children:
            raise TreebankFormatError(
                f"constituent {label!r} has no children", offset=open_offset)
        node = Tree.node(label, children)
        leaf_kids = sum(1 for c in children if c.is_leaf)
        if leaf_kids and leaf_kids < len(children):
            diagnostics.append(
                f"leaf with non-leaf siblings under {label!r} (offset {open_offset})")
        elif leaf_kids > 1:
            diagnostics.append(
                f"flat preterminal {label!r} with {leaf_kids} leaves (offset {open_offset})")
        return node, i

    while pos < len(tokens):
        tok, offset = tokens[pos]
        if tok != "(":
            raise TreebankFormatError(f"unexpected {tok!r} outside tree", offset=offset)
        tree, pos = parse_node(pos)
        trees.append(tree)
    return trees, diagnostics


def parse_bracketed(text: str) -> list[Tree]:
    """Parse every top-level bracketed tree in ``text``, in order."""
    trees, diagnostics = scan_bracketed(text)
    for message in diagnostics:
        log.debug("treebank diagnostic: %s", message)
    return trees


def serialize_tree(tree: Tree) -> str:
    """Render a tree as a single bracketed line; inverse of parse_bracketed."""

    def render(node: Tree) -> str:
        if node.is_leaf:
            return escape_atom(_checked_atom(node.token, "token"))
        inner = " ".join(render(c) for c in node.children)
        return f"({escape_atom(_checked_atom(node.label, 'label'))} {inner})"

    return render(tree)


def _checked_atom(text: str | None, kind: str) -> str:
    if not text:
        raise ValueError(f"empty {kind} is not serializable")
    if any(ch.isspace() for ch in text):
        raise ValueError(f"{kind} {text!r} contains whitespace")
    return text


def read_treebank(path: str | Path) -> list[Tree]:
    return parse_bracketed(Path(path).read_text(encoding="utf-8"))


def write_treebank(trees: Iterable[Tree], path: str | Path) -> None:
    lines = [serialize_tree(t) for t in trees]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def split_treebank(trees: list[Tree], train_count: int) -> tuple[list[Tree], list[Tree]]:
    """Split a treebank into (first ``train_count`` trees, the remainder)."""
    if not 0 <= train_count <= len(trees):
        raise ValueError(
            f"train_count {train_count} out of range for {len(trees)} trees")
    return trees[:train_count], trees[train_count:]


@dataclass(frozen=True)
class ExtendedTag:
    """A POS tag plus an ordered tuple of morphological feature values."""

    pos: str
    features: tuple[str, ...] = ()

    def serialized(self, sep: str = TAG_SEPARATOR) -> str:
        return sep.join((self.pos,) + self.features)

    @staticmethod
    def parse(text: str, sep: str = TAG_SEPARATOR) -> "ExtendedTag":
        """Parse ``POS.Feat1.Feat2`` notation.

        Strings that do not split cleanly on ``sep`` (empty parts, e.g. the
        punctuation tag ``$.``) are treated as an atomic POS with no
        features, so that real tag inventories never halt the pipeline.
        """
        if not text or any(ch.isspace() for ch in text):
            raise ValueError(f"invalid extended tag {text!r}")
        parts = text.split(sep)
        if any(not p for p in parts):
            return ExtendedTag(text, ())
        return ExtendedTag(parts[0], tuple(parts[1:]))


@dataclass(frozen=True)
class TaggedSentence:
    """Parallel token and tag sequences of equal, nonzero length."""

    tokens: tuple[str, ...]
    tags: tuple[ExtendedTag, ...]

    def __post_init__(self):
        if not self.tokens or len(self.tokens) != len(self.tags):
            raise ValueError(
                f"{len(self.tokens)} tokens vs {len(self.tags)} tags")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TagMapTable:
    """Source-to-target tag correspondences; lookups not present fall through."""

    pos_map: Mapping[str, ExtendedTag]
    feature_map: Mapping[str, str]


def read_tagged_corpus(text: str, sep: str = TAG_SEPARATOR) -> list[TaggedSentence]:
    """Read a tab-separated tagged corpus; blank lines separate sentences."""
    sentences: list[TaggedSentence] = []
    tokens: list[str] = []
    tags: list[ExtendedTag] = []
    prev_blank = False

    def flush():
        nonlocal tokens, tags
        if tokens:
            sentences.append(TaggedSentence(tuple(tokens), tuple(tags)))
            tokens, tags = [], []

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip():
            if prev_blank:
                log.warning("skipping empty sentence at line %d", lineno)
            flush()
            prev_blank = True
            continue
        prev_blank = False
        if "\t" not in line:
            raise TreebankFormatError("expected token<TAB>tag", line=lineno)
        token, tag_text = line.split("\t", 1)
        if not token or not tag_text or any(ch.isspace() for ch in tag_text):
            raise TreebankFormatError(
                f"malformed tagged line {line!r}", line=lineno)
        try:
            tag = ExtendedTag.parse(tag_text, sep)
        except ValueError as exc:
            raise TreebankFormatError(str(exc), line=lineno) from exc
        tokens.append(token)
        tags.append(tag)
    flush()
    return sentences


def write_tagged_corpus(sentences: Iterable[TaggedSentence], path: str | Path,
                        sep: str = TAG_SEPARATOR) -> None:
    lines: list[str] = []
    for sentence in sentences:
        for token, tag in zip(sentence.tokens, sentence.tags):
            lines.append(f"{token}\t{tag.serialized(sep)}")
        lines.append("")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_tagged_corpus_file(path: str | Path, sep: str = TAG_SEPARATOR) -> list[TaggedSentence]:
    return read_tagged_corpus(Path(path).read_text(encoding="utf-8"), sep)


_SECTIONS = ("pos", "features")


def read_tag_map(text: str, sep: str = TAG_SEPARATOR) -> TagMapTable:
    """Read a sectioned ``[pos]`` / ``[features]`` tag map table."""
    pos_map: dict[str, ExtendedTag] = {}
    feature_map: dict[str, str] = {}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            if section not in _SECTIONS:
                raise TreebankFormatError(
                    f"unknown section {section!r}", line=lineno)
            continue
        if section is None:
            raise TreebankFormatError("entry before section header", line=lineno)
        if "\t" not in line:
            raise TreebankFormatError("expected source<TAB>target", line=lineno)
        source, target = (part.strip() for part in line.split("\t", 1))
        if not source or not target:
            raise TreebankFormatError("empty source or target", line=lineno)
        if section == "pos":
            if source in pos_map:
                raise TreebankFormatError(
                    f"duplicate source tag {source!r}", line=lineno)
            try:
                tag = ExtendedTag.parse(target, sep)
            except ValueError as exc:
                raise TreebankFormatError(str(exc), line=lineno) from exc
            if "|" in target:
                raise TreebankFormatError(
                    f"target tag {target!r} contains '|'", line=lineno)
            pos_map[source] = tag
        else:
            if source in feature_map:
                raise TreebankFormatError(
                    f"duplicate source feature {source!r}", line=lineno)
            if sep in target or "|" in target:
                raise TreebankFormatError(
                    f"invalid target feature {target!r}", line=lineno)
            feature_map[source] = target
    return TagMapTable(pos_map, feature_map)


def read_tag_map_file(path: str | Path, sep: str = TAG_SEPARATOR) -> TagMapTable:
    return read_tag_map(Path(path).read_text(encoding="utf-8"), sep)
