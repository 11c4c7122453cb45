"""Bundled data files: a 50-tree toy treebank and the default tag map."""

from pathlib import Path

_HERE = Path(__file__).parent


def toy_treebank_path() -> Path:
    return _HERE / "toy_treebank.brackets"


def default_tagmap_path() -> Path:
    return _HERE / "default.tagmap"
