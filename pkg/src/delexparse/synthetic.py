"""Synthetic treebanks and corpora for demos, verification, and smoke runs.

No licensed treebank material is bundled with this package; everything
here is generated from small word lists with seeded RNGs, so corpora are
reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from .treebank import Tree

PHRASE_LABELS = ("S", "NP", "VP", "PP", "AP", "ADVP")
TAG_LABELS = ("NN", "ART", "VVFIN", "ADJA", "ADV", "APPR")
TOKENS = ("der", "die", "das", "Haus", "Mann", "Frau", "kommt", "sieht",
          "alte", "gern", "mit", "auf", "heute", "Kind", "(", ")", "a(b")

_GENDERS = ("Masc", "Fem", "Neut")
_ART = {
    ("Nom", "Masc"): "der", ("Acc", "Masc"): "den", ("Dat", "Masc"): "dem",
    ("Nom", "Fem"): "die", ("Acc", "Fem"): "die", ("Dat", "Fem"): "der",
    ("Nom", "Neut"): "das", ("Acc", "Neut"): "das", ("Dat", "Neut"): "dem",
}
_NOUNS = {
    "Masc": ("Mann", "Hund", "Baum", "Wagen", "Vogel"),
    "Fem": ("Frau", "Stadt", "Katze", "Blume"),
    "Neut": ("Kind", "Haus", "Pferd", "Buch"),
}
_ADJ = ("alte", "kleine", "rote", "junge")
_VERBS = ("sieht", "liebt", "kennt", "sucht", "findet", "hört")
_DAT_VERBS = ("hilft", "folgt", "dankt")
_PREPS = {"mit": "Dat", "auf": "Acc", "an": "Dat", "in": "Acc"}
_ADVS = ("heute", "gern", "hier", "oft")


def _pret(label: str, token: str) -> Tree:
    return Tree.node(label, [Tree.leaf(token)])


def _noun_phrase(rng, case: str, edge: str | None = None,
                 with_adj: bool = False) -> Tree:
    gender = _GENDERS[rng.integers(len(_GENDERS))]
    noun = _NOUNS[gender][rng.integers(len(_NOUNS[gender]))]
    morph = f"{case}.Sg.{gender}"
    children = [_pret(f"ART.{morph}", _ART[(case, gender)])]
    if with_adj:
        children.append(_pret(f"ADJA.{morph}", _ADJ[rng.integers(len(_ADJ))]))
    children.append(_pret(f"NN.{morph}", noun))
    label = "NP" if edge is None else f"NP-{edge}"
    return Tree.node(label, children)


def _verb(rng, dative: bool = False) -> Tree:
    pool = _DAT_VERBS if dative else _VERBS
    return _pret("VVFIN.3.Sg.Pres", pool[rng.integers(len(pool))])


def _prep_phrase(rng, with_adj: bool = False) -> Tree:
    prep = list(_PREPS)[rng.integers(len(_PREPS))]
    return Tree.node("PP", [_pret("APPR", prep),
                            _noun_phrase(rng, _PREPS[prep], with_adj=with_adj)])


def _adverb(rng) -> Tree:
    return _pret("ADV", _ADVS[rng.integers(len(_ADVS))])


def _full_stop() -> Tree:
    return _pret("$.", ".")


def toy_treebank(count: int = 50, seed: int = 20) -> list[Tree]:
    """German-like sentences with annotated edge labels and morphology.

    Every tree has a distinct delexicalized tag sequence, so a parser can
    in principle memorize the treebank perfectly.
    """
    rng = np.random.default_rng(seed)
    trees: list[Tree] = []
    seen: set[tuple[str, ...]] = set()

    def signature(tree: Tree) -> tuple[str, ...]:
        return tuple(p.label for p in tree.preterminals())

    while len(trees) < count:
        kind = int(rng.integers(7))
        subject = _noun_phrase(rng, "Nom", edge="SB",
                               with_adj=bool(rng.integers(2)))
        verb = _verb(rng)
        if kind == 0:
            body = [subject, verb]
        elif kind == 1:
            body = [subject, verb,
                    _noun_phrase(rng, "Acc", edge="OA", with_adj=bool(rng.integers(2)))]
        elif kind == 2:
            body = [subject, verb, _prep_phrase(rng, with_adj=bool(rng.integers(2)))]
        elif kind == 3:
            body = [subject, verb, _adverb(rng),
                    _noun_phrase(rng, "Acc", edge="OA")]
        elif kind == 4:
            obj = _noun_phrase(rng, "Dat", edge="DA")
            body = [subject, Tree.node("VP", [_verb(rng, dative=True), obj])]
        elif kind == 5:
            body = [subject, verb,
                    _noun_phrase(rng, "Acc", edge="OA", with_adj=True),
                    _prep_phrase(rng)]
        else:
            body = [subject, Tree.node("VP", [_verb(rng, dative=True),
                                              _adverb(rng),
                                              _noun_phrase(rng, "Dat", edge="DA")])]
        tree = Tree.node("S", body + [_full_stop()])
        sig = signature(tree)
        if sig in seen:
            continue
        seen.add(sig)
        trees.append(tree)
    return trees


def morph_structure_treebank(count: int, seed: int = 7) -> list[Tree]:
    """Sentences whose bracketing depends jointly on POS and morphology.

    Two devices create the dependency: an accusative second noun phrase
    attaches inside the verb phrase while a dative one attaches to the
    clause, and two four-token patterns share a length but differ in POS
    order and structure.  Dropping morphology or renaming the POS tags
    therefore makes part of the treebank unlearnable.
    """
    rng = np.random.default_rng(seed)
    trees: list[Tree] = []
    for _ in range(count):
        kind = int(rng.integers(4))
        if kind in (0, 1):
            case = "Acc" if kind == 0 else "Dat"
            subject = _noun_phrase(rng, "Nom")
            verb = _verb(rng, dative=(case == "Dat"))
            obj = _noun_phrase(rng, case)
            if case == "Acc":
                tree = Tree.node("S", [subject, Tree.node("VP", [verb, obj])])
            else:
                tree = Tree.node("S", [subject, Tree.node("VP", [verb]), obj])
        elif kind == 2:
            tree = Tree.node("S", [
                _noun_phrase(rng, "Nom"),
                Tree.node("VP", [_verb(rng), _adverb(rng)])])
        else:
            tree = Tree.node("S", [
                Tree.node("VP", [_adverb(rng), _verb(rng)]),
                _noun_phrase(rng, "Nom")])
        trees.append(tree)
    return trees


def random_tree(rng: np.random.Generator, max_leaves: int = 8,
                unary_prob: float = 0.2) -> Tree:
    """A random well-formed tree for round-trip property tests."""
    n_leaves = int(rng.integers(1, max_leaves + 1))

    def wrap_unary(node: Tree) -> Tree:
        while rng.random() < unary_prob:
            node = Tree.node(PHRASE_LABELS[rng.integers(len(PHRASE_LABELS))], [node])
        return node

    def build(n: int) -> Tree:
        if n == 1:
            tag = TAG_LABELS[rng.integers(len(TAG_LABELS))]
            token = TOKENS[rng.integers(len(TOKENS))]
            return wrap_unary(_pret(tag, token))
        parts = min(n, 2 + int(rng.integers(3)))
        cuts = sorted(rng.choice(np.arange(1, n), size=parts - 1, replace=False))
        sizes = np.diff([0, *cuts, n])
        label = PHRASE_LABELS[rng.integers(len(PHRASE_LABELS))]
        return wrap_unary(Tree.node(label, [build(int(s)) for s in sizes]))

    node = build(n_leaves)
    if node.is_preterminal:  # keep a phrase above the tags
        node = Tree.node(PHRASE_LABELS[rng.integers(len(PHRASE_LABELS))], [node])
    return node


def random_annotated_tree(rng: np.random.Generator, max_leaves: int = 8) -> Tree:
    """A random tree decorated with edge labels, coindexation, and traces."""
    tree = random_tree(rng, max_leaves)

    def decorate(node: Tree, is_root: bool) -> Tree:
        if node.is_leaf or node.is_preterminal:
            return node
        label = node.label
        if rng.random() < 0.4:
            label += "-" + ("SB", "OA", "HD", "MO")[rng.integers(4)]
        if rng.random() < 0.2:
            label += f"={int(rng.integers(1, 4))}"
        children = [decorate(c, False) for c in node.children]
        if rng.random() < 0.25:
            trace = _pret("-NONE-", ("*T*1", "*", "*T*2")[rng.integers(3)])
            where = int(rng.integers(len(children) + 1))
            children.insert(where, trace)
        return Tree(label, tuple(children), None)

    return decorate(tree, True)
