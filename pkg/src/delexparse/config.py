"""Declarative pipeline configuration: INI-style sections plus overrides.

A config file groups keys into ``[paths]``, ``[mode]``, ``[model]``,
``[train]``, ``[transform]``, ``[eval]``, and ``[tagger]`` sections.
Command-line flags override file values, and the ``desk`` / ``paper``
presets pick the base model and training dimensions.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from .evalb import EvalConfig
from .model import DESK_MODEL, PAPER_MODEL, ModelConfig
from .trainer import DESK_TRAIN, PAPER_TRAIN, TrainConfig
from .transform import TransformConfig

# Path keys a config file or command line may set.  Inputs are validated
# for existence by the commands that consume them.
PATH_KEYS = (
    "train_treebank", "dev_treebank", "gold_treebank", "pred_treebank",
    "treebank", "tagged_corpus", "tokens", "tag_map", "tagger_model",
    "train_corpus", "checkpoint", "checkpoint_dir", "train_log",
    "parse_output", "tagged_output", "delex_output", "report",
    "latin_lexicon", "filtered_treebank", "filter_report",
)

_MODES = ("delexicalized", "lexicalized")
_PRESETS = ("desk", "paper")


@dataclass
class PipelineConfig:
    paths: dict[str, str] = field(default_factory=dict)
    mode: str = "delexicalized"
    use_gold_tags: bool = False
    apply_mapping: bool = True
    keep_morphology: bool = True
    preset: str = "desk"
    composite_separator: str = "|"
    strip_only: bool = False
    tagger_epochs: int = 5
    tagger_seed: int = 10
    model: ModelConfig = DESK_MODEL
    train: TrainConfig = DESK_TRAIN
    transform: TransformConfig = TransformConfig()
    eval: EvalConfig = EvalConfig()

    def transform_config(self) -> TransformConfig:
        return replace(self.transform, keep_morphology=self.keep_morphology)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _section(parser: configparser.ConfigParser, name: str) -> dict[str, str]:
    return dict(parser[name]) if parser.has_section(name) else {}


def _typed(cls, section: dict[str, str], base) -> Any:
    """Overlay string config values onto a dataclass, respecting field types."""
    kwargs = {}
    for fld, value in section.items():
        if fld not in base.__dataclass_fields__:
            raise ValueError(f"unknown {cls.__name__} key {fld!r}")
        kind = type(getattr(base, fld))
        if kind is bool:
            kwargs[fld] = _parse_bool(value)
        elif kind is int:
            kwargs[fld] = int(value)
        elif kind is float:
            kwargs[fld] = float(value)
        elif kind is tuple:
            kwargs[fld] = tuple(value.split())
        else:
            kwargs[fld] = value
    return replace(base, **kwargs)


def _eval_config(section: dict[str, str]) -> EvalConfig:
    kwargs: dict[str, Any] = {}
    if "punctuation_tags" in section:
        kwargs["punctuation_tags"] = frozenset(section["punctuation_tags"].split())
    if "ignore_labels" in section:
        kwargs["ignore_labels"] = frozenset(section["ignore_labels"].split())
    if "label_equivalences" in section:
        pairs = (item.split("=", 1) for item in section["label_equivalences"].split())
        kwargs["label_equivalences"] = {src: tgt for src, tgt in pairs}
    if "include_root" in section:
        kwargs["include_root"] = _parse_bool(section["include_root"])
    return EvalConfig(**kwargs)


def load_pipeline_config(config_path: str | None = None,
                         overrides: dict[str, Any] | None = None,
                         path_overrides: dict[str, str] | None = None,
                         ) -> PipelineConfig:
    """Assemble the effective configuration.

    Precedence, lowest to highest: preset defaults, config file sections,
    then command-line overrides.  ``overrides['seed']`` sets the model,
    training, and tagger seeds at once.
    """
    overrides = dict(overrides or {})
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep keys case-sensitive
    if config_path is not None:
        read = parser.read(config_path, encoding="utf-8")
        if not read:
            raise FileNotFoundError(f"config file {config_path!r} not found")

    mode_section = _section(parser, "mode")
    preset = overrides.get("preset") or mode_section.get("preset", "desk")
    if preset not in _PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    model_base = PAPER_MODEL if preset == "paper" else DESK_MODEL
    train_base = PAPER_TRAIN if preset == "paper" else DESK_TRAIN

    cfg = PipelineConfig(preset=preset)
    cfg.model = _typed(ModelConfig, _section(parser, "model"), model_base)
    cfg.train = _typed(TrainConfig, _section(parser, "train"), train_base)
    cfg.transform = _typed(TransformConfig, _section(parser, "transform"),
                           TransformConfig())
    cfg.eval = _eval_config(_section(parser, "eval"))

    for key, value in _section(parser, "paths").items():
        if key not in PATH_KEYS:
            raise ValueError(f"unknown path key {key!r}")
        cfg.paths[key] = value
    for key, value in (path_overrides or {}).items():
        if value is not None:
            cfg.paths[key] = value

    if "mode" in mode_section:
        cfg.mode = mode_section["mode"]
    for flag in ("use_gold_tags", "apply_mapping", "keep_morphology"):
        if flag in mode_section:
            setattr(cfg, flag, _parse_bool(mode_section[flag]))
    if "composite_separator" in mode_section:
        cfg.composite_separator = mode_section["composite_separator"]

    tagger_section = _section(parser, "tagger")
    if "epochs" in tagger_section:
        cfg.tagger_epochs = int(tagger_section["epochs"])
    if "seed" in tagger_section:
        cfg.tagger_seed = int(tagger_section["seed"])

    for flag in ("mode", "use_gold_tags", "apply_mapping", "keep_morphology",
                 "strip_only"):
        if overrides.get(flag) is not None:
            setattr(cfg, flag, overrides[flag])
    if overrides.get("seed") is not None:
        seed = int(overrides["seed"])
        cfg.model = replace(cfg.model, seed=seed)
        cfg.train = replace(cfg.train, seed=seed)
        cfg.tagger_seed = seed

    if cfg.mode not in _MODES:
        raise ValueError(f"unknown mode {cfg.mode!r}")
    if cfg.use_gold_tags and not cfg.paths.get("gold_treebank"):
        raise ValueError("use_gold_tags requires a gold_treebank path")
    cfg.transform = replace(cfg.transform, keep_morphology=cfg.keep_morphology)
    return cfg


def config_snapshot(cfg: PipelineConfig) -> dict[str, Any]:
    """JSON-ready snapshot of the effective configuration."""
    eval_dict = {
        "punctuation_tags": sorted(cfg.eval.punctuation_tags),
        "ignore_labels": sorted(cfg.eval.ignore_labels),
        "label_equivalences": dict(sorted(cfg.eval.label_equivalences.items())),
        "include_root": cfg.eval.include_root,
    }
    return {
        "mode": cfg.mode,
        "use_gold_tags": cfg.use_gold_tags,
        "apply_mapping": cfg.apply_mapping,
        "keep_morphology": cfg.keep_morphology,
        "preset": cfg.preset,
        "composite_separator": cfg.composite_separator,
        "tagger_epochs": cfg.tagger_epochs,
        "tagger_seed": cfg.tagger_seed,
        "paths": dict(sorted(cfg.paths.items())),
        "model": asdict(cfg.model),
        "train": asdict(cfg.train),
        "transform": asdict(cfg.transform),
        "eval": eval_dict,
    }


def write_example_config(path: str | Path) -> None:
    """Write a documented template config file."""
    Path(path).write_text(EXAMPLE_CONFIG, encoding="utf-8")


EXAMPLE_CONFIG = """\
# delexparse pipeline configuration
[paths]
train_treebank = data/source.brackets
dev_treebank = data/source_dev.brackets
gold_treebank = data/target.brackets
tagged_corpus = data/target.tags
tag_map = data/default.tagmap
checkpoint = out/parser.ckpt
train_log = out/train.log
parse_output = out/predicted.brackets
report = out/eval.report

[mode]
mode = delexicalized
use_gold_tags = false
apply_mapping = true
keep_morphology = true
preset = desk

[model]
# preset values may be overridden per key
model_dim = 128
num_layers = 2
num_heads = 4
head_dim = 32
ff_dim = 256
max_len = 128
seed = 10

[train]
epochs = 200
batch_size = 8
learning_rate = 0.001
optimizer = adam
shuffle = true
seed = 10

[transform]
edge_separator = -
trace_label = -NONE-
morph_separator = .

[eval]
punctuation_tags = $, $. $(

[tagger]
epochs = 5
seed = 10
"""
