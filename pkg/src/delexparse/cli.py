"""Command-line pipeline wiring the toolkit modules together.

Subcommands: train, parse, tag, map-tags, delex, eval, filter.  Every run
writes a ``<output>.manifest`` JSON recording the effective configuration
and SHA-256 checksums of the inputs, so runs can be reproduced and
compared byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import evalb, model, tagger, tagmap, trainer, transform
from .config import PipelineConfig, config_snapshot, load_pipeline_config
from .treebank import (ExtendedTag, TreebankFormatError, read_tag_map_file,
                       read_tagged_corpus_file, read_treebank, serialize_tree,
                       write_tagged_corpus, write_treebank)

log = logging.getLogger(__name__)


class CliError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def _input_path(cfg: PipelineConfig, key: str) -> Path:
    value = cfg.paths.get(key)
    if not value:
        raise CliError("load", f"missing required path {key!r}")
    path = Path(value)
    if not path.exists():
        raise CliError("load", f"input {key}={value} does not exist")
    return path


def _output_path(cfg: PipelineConfig, key: str, default: str | None = None) -> Path:
    value = cfg.paths.get(key) or default
    if not value:
        raise CliError("load", f"missing required output path {key!r}")
    path = Path(value)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(command: str, cfg: PipelineConfig, inputs: dict[str, Path],
                    outputs: list[Path], anchor: Path) -> None:
    payload = {
        "command": command,
        "config": config_snapshot(cfg),
        "inputs": {key: {"path": str(path), "sha256": _sha256(path)}
                   for key, path in sorted(inputs.items())},
        "outputs": [str(p) for p in outputs],
    }
    manifest = anchor.with_name(anchor.name + ".manifest")
    manifest.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")


def _load_trees(cfg: PipelineConfig, key: str):
    path = _input_path(cfg, key)
    try:
        return read_treebank(path), path
    except TreebankFormatError as exc:
        raise CliError("load", f"{path}: {exc}") from exc


def _prepare_trees(trees, cfg: PipelineConfig, stage: str = "transform"):
    """Strip, optionally delexicalize, and binarize a treebank for training."""
    tcfg = cfg.transform_config()
    prepared = []
    for index, tree in enumerate(trees):
        try:
            tree = transform.strip_annotations(tree, tcfg)
            if cfg.mode == "delexicalized":
                tree = transform.delexicalize_tree(tree, tcfg)
            prepared.append(transform.binarize(tree))
        except ValueError as exc:
            raise CliError(stage, f"tree {index}: {exc}") from exc
    return prepared


def cmd_train(cfg: PipelineConfig) -> int:
    trees, train_path = _load_trees(cfg, "train_treebank")
    inputs = {"train_treebank": train_path}
    train_trees = _prepare_trees(trees, cfg)
    if cfg.paths.get("dev_treebank"):
        dev_raw, dev_path = _load_trees(cfg, "dev_treebank")
        dev_trees = _prepare_trees(dev_raw, cfg)
        inputs["dev_treebank"] = dev_path
    else:
        dev_trees = train_trees
    checkpoint = _output_path(cfg, "checkpoint")
    log_path = _output_path(cfg, "train_log", default=str(checkpoint) + ".log")
    checkpoint_dir = cfg.paths.get("checkpoint_dir")
    if checkpoint_dir:
        Path(checkpoint_dir).mkdir(parents=True, exist_ok=True)
    try:
        params = trainer.train(train_trees, dev_trees, cfg.model, cfg.train,
                               log_path=log_path, checkpoint_dir=checkpoint_dir,
                               atomic_tags=(cfg.mode == "lexicalized"))
    except ValueError as exc:
        raise CliError("train", str(exc)) from exc
    model.save_checkpoint(params, checkpoint)
    _write_manifest("train", cfg, inputs, [checkpoint, log_path], checkpoint)
    print(f"checkpoint written to {checkpoint}")
    return 0


def _gather_sentences(cfg: PipelineConfig, inputs: dict[str, Path],
                      need_tags: bool = True):
    """Input sentences as (tokens, tags) pairs per the configured source.

    With ``need_tags`` false (lexicalized mode), a raw tokens file needs no
    tagger and yields ``tags=None``.
    """
    tcfg = cfg.transform_config()
    sentences: list[tuple[list[str], list[ExtendedTag] | None]] = []
    if cfg.use_gold_tags:
        path = _input_path(cfg, "gold_treebank")
        inputs["gold_treebank"] = path
        for tree in read_treebank(path):
            stripped = transform.strip_annotations(tree, tcfg)
            tokens = stripped.leaf_tokens()
            tags = [ExtendedTag.parse(p.label, tcfg.morph_separator)
                    for p in stripped.preterminals()]
            sentences.append((tokens, tags))
    elif cfg.paths.get("tagged_corpus"):
        path = _input_path(cfg, "tagged_corpus")
        inputs["tagged_corpus"] = path
        for sentence in read_tagged_corpus_file(path, tcfg.morph_separator):
            sentences.append((list(sentence.tokens), list(sentence.tags)))
    elif cfg.paths.get("tokens"):
        path = _input_path(cfg, "tokens")
        inputs["tokens"] = path
        tag_model = None
        if need_tags:
            tagger_path = _input_path(cfg, "tagger_model")
            inputs["tagger_model"] = tagger_path
            tag_model = tagger.load_tagger(tagger_path)
        for line in path.read_text(encoding="utf-8").splitlines():
            tokens = line.split()
            if not tokens:
                continue
            if tag_model is None:
                sentences.append((tokens, None))
            else:
                tagged = tagger.tag_sentence(tag_model, tokens)
                sentences.append((tokens, list(tagged.tags)))
    else:
        raise CliError("load", "no input: set gold_treebank with use_gold_tags, "
                               "tagged_corpus, or tokens plus tagger_model")
    return sentences


def cmd_parse(cfg: PipelineConfig) -> int:
    checkpoint = _input_path(cfg, "checkpoint")
    inputs = {"checkpoint": checkpoint}
    try:
        params = model.load_checkpoint(checkpoint)
    except model.ModelError as exc:
        raise CliError("load", f"{checkpoint}: {exc}") from exc
    lexicalized = cfg.mode == "lexicalized"
    try:
        sentences = _gather_sentences(cfg, inputs, need_tags=not lexicalized)
    except (TreebankFormatError, ValueError) as exc:
        raise CliError("input", str(exc)) from exc

    if lexicalized:
        tag_lists = [[ExtendedTag(tok) for tok in tokens]
                     for tokens, _ in sentences]
    else:
        if cfg.apply_mapping:
            if cfg.paths.get("tag_map"):
                table_path = _input_path(cfg, "tag_map")
                inputs["tag_map"] = table_path
                table = read_tag_map_file(table_path)
            else:
                table = tagmap.default_table()
            sentences = [
                (tokens,
                 [tagmap.map_extended_tag(t, table, cfg.composite_separator)
                  for t in tags])
                for tokens, tags in sentences]
        if cfg.keep_morphology:
            tag_lists = [tags for _, tags in sentences]
        else:
            tag_lists = [[ExtendedTag(t.pos) for t in tags]
                         for _, tags in sentences]

    results = trainer.parse_corpus(params, tag_lists)
    output = _output_path(cfg, "parse_output")
    lines = []
    failures = 0
    for index, ((tokens, tags), tree) in enumerate(zip(sentences, results)):
        if tree is None:
            failures += 1
            continue
        try:
            if lexicalized and tags is not None:
                # restore real tag labels at the preterminals, which carry
                # embedded word types in lexicalized mode
                tree = transform.relabel_preterminals(tree, [t.pos for t in tags])
            lines.append(serialize_tree(transform.relexicalize_tree(tree, tokens)))
        except ValueError as exc:
            log.warning("sentence %d unusable: %s", index, exc)
            failures += 1
    output.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    _write_manifest("parse", cfg, inputs, [output], output)
    print(f"parsed {len(lines)}/{len(sentences)} sentences "
          f"({failures} failures) -> {output}")
    return 0


def cmd_eval(cfg: PipelineConfig) -> int:
    gold_path = _input_path(cfg, "gold_treebank")
    pred_path = _input_path(cfg, "pred_treebank")
    gold = read_treebank(gold_path)
    pred = read_treebank(pred_path)
    try:
        result, rows = evalb.score_corpus_detailed(gold, pred, cfg.eval)
    except ValueError as exc:
        raise CliError("eval", str(exc)) from exc
    report = _output_path(cfg, "report", default=str(pred_path) + ".report")
    evalb.write_report(result, rows, report)
    _write_manifest("eval", cfg, {"gold_treebank": gold_path,
                                  "pred_treebank": pred_path}, [report], report)
    print(evalb.format_summary(result))
    return 0


def cmd_tag(cfg: PipelineConfig) -> int:
    inputs: dict[str, Path] = {}
    tag_model = None
    outputs: list[Path] = []
    anchor: Path | None = None
    if cfg.paths.get("train_corpus"):
        corpus_path = _input_path(cfg, "train_corpus")
        inputs["train_corpus"] = corpus_path
        corpus = read_tagged_corpus_file(corpus_path)
        try:
            tag_model = tagger.train_tagger(corpus, cfg.tagger_epochs, cfg.tagger_seed)
        except ValueError as exc:
            raise CliError("train", str(exc)) from exc
        model_out = _output_path(cfg, "tagger_model")
        tagger.save_tagger(tag_model, model_out)
        outputs.append(model_out)
        anchor = model_out
        print(f"tagger model written to {model_out}")
    if cfg.paths.get("tokens"):
        if tag_model is None:
            model_path = _input_path(cfg, "tagger_model")
            inputs["tagger_model"] = model_path
            tag_model = tagger.load_tagger(model_path)
        tokens_path = _input_path(cfg, "tokens")
        inputs["tokens"] = tokens_path
        tagged = []
        for line in tokens_path.read_text(encoding="utf-8").splitlines():
            tokens = line.split()
            if tokens:
                tagged.append(tagger.tag_sentence(tag_model, tokens))
        output = _output_path(cfg, "tagged_output")
        write_tagged_corpus(tagged, output)
        outputs.append(output)
        anchor = output
        print(f"tagged {len(tagged)} sentences -> {output}")
    if anchor is None:
        raise CliError("load", "tag needs train_corpus and/or tokens input")
    _write_manifest("tag", cfg, inputs, outputs, anchor)
    return 0


def cmd_map_tags(cfg: PipelineConfig) -> int:
    corpus_path = _input_path(cfg, "tagged_corpus")
    inputs = {"tagged_corpus": corpus_path}
    if cfg.paths.get("tag_map"):
        table_path = _input_path(cfg, "tag_map")
        inputs["tag_map"] = table_path
        table = read_tag_map_file(table_path)
    else:
        table = tagmap.default_table()
    sentences = read_tagged_corpus_file(corpus_path)
    mapped = [tagmap.map_sentence(s, table, cfg.composite_separator)
              for s in sentences]
    output = _output_path(cfg, "tagged_output")
    write_tagged_corpus(mapped, output)
    _write_manifest("map-tags", cfg, inputs, [output], output)
    print(f"mapped {len(mapped)} sentences -> {output}")
    return 0


def cmd_delex(cfg: PipelineConfig) -> int:
    tcfg = cfg.transform_config()
    output = _output_path(cfg, "delex_output")
    if cfg.paths.get("treebank"):
        path = _input_path(cfg, "treebank")
        trees = read_treebank(path)
        done = []
        for index, tree in enumerate(trees):
            try:
                stripped = transform.strip_annotations(tree, tcfg)
                done.append(stripped if cfg.strip_only
                            else transform.delexicalize_tree(stripped, tcfg))
            except ValueError as exc:
                raise CliError("transform", f"tree {index}: {exc}") from exc
        write_treebank(done, output)
        _write_manifest("delex", cfg, {"treebank": path}, [output], output)
        print(f"wrote {len(done)} trees -> {output}")
        return 0
    if cfg.paths.get("tagged_corpus"):
        path = _input_path(cfg, "tagged_corpus")
        sentences = read_tagged_corpus_file(path, tcfg.morph_separator)
        lines = [" ".join(transform.delexicalize_sentence(s, tcfg))
                 for s in sentences]
        output.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        _write_manifest("delex", cfg, {"tagged_corpus": path}, [output], output)
        print(f"wrote {len(lines)} sentences -> {output}")
        return 0
    raise CliError("load", "delex needs a treebank or tagged_corpus input")


def cmd_filter(cfg: PipelineConfig) -> int:
    path = _input_path(cfg, "treebank")
    inputs = {"treebank": path}
    lexicon: set[str] = set()
    if cfg.paths.get("latin_lexicon"):
        lex_path = _input_path(cfg, "latin_lexicon")
        inputs["latin_lexicon"] = lex_path
        lexicon = {line.strip() for line in
                   lex_path.read_text(encoding="utf-8").splitlines() if line.strip()}
    trees = read_treebank(path)
    kept, report = transform.filter_target_treebank(trees, lexicon)
    output = _output_path(cfg, "filtered_treebank")
    write_treebank(kept, output)
    report_path = _output_path(cfg, "filter_report", default=str(output) + ".report")
    report_path.write_text("".join(line + "\n" for line in report), encoding="utf-8")
    _write_manifest("filter", cfg, inputs, [output, report_path], output)
    print(f"kept {len(kept)}/{len(trees)} trees -> {output}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "parse": cmd_parse,
    "tag": cmd_tag,
    "map-tags": cmd_map_tags,
    "delex": cmd_delex,
    "eval": cmd_eval,
    "filter": cmd_filter,
}

_PATH_FLAGS = {
    "train": ("train_treebank", "dev_treebank", "checkpoint", "checkpoint_dir",
              "train_log"),
    "parse": ("checkpoint", "gold_treebank", "tagged_corpus", "tokens",
              "tagger_model", "tag_map", "parse_output"),
    "tag": ("train_corpus", "tagger_model", "tokens", "tagged_output"),
    "map-tags": ("tagged_corpus", "tag_map", "tagged_output"),
    "delex": ("treebank", "tagged_corpus", "delex_output"),
    "eval": ("gold_treebank", "pred_treebank", "report"),
    "filter": ("treebank", "latin_lexicon", "filtered_treebank",
               "filter_report"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delexparse",
        description="Delexicalized cross-lingual constituency parsing pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--config", help="INI config file")
        p.add_argument("--mode", choices=("delexicalized", "lexicalized"))
        p.add_argument("--use-gold-tags", action="store_true", default=None)
        p.add_argument("--no-mapping", action="store_true", default=None)
        p.add_argument("--no-morph", action="store_true", default=None)
        p.add_argument("--seed", type=int)
        p.add_argument("--preset", choices=("desk", "paper"))
        if command == "delex":
            p.add_argument("--strip-only", action="store_true", default=None)
        for key in _PATH_FLAGS[command]:
            p.add_argument("--" + key.replace("_", "-"), dest=key)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    args = _build_parser().parse_args(argv)
    overrides = {
        "mode": args.mode,
        "use_gold_tags": args.use_gold_tags,
        "apply_mapping": False if args.no_mapping else None,
        "keep_morphology": False if args.no_morph else None,
        "seed": args.seed,
        "preset": args.preset,
        "strip_only": getattr(args, "strip_only", None),
    }
    path_overrides = {key: getattr(args, key) for key in _PATH_FLAGS[args.command]}
    try:
        cfg = load_pipeline_config(args.config, overrides, path_overrides)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: stage=load: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: stage={exc.stage}: {exc}", file=sys.stderr)
        return 2
    except TreebankFormatError as exc:
        print(f"error: stage=input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
