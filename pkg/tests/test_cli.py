import json

from delexparse import cli, data
from delexparse.treebank import (ExtendedTag, parse_bracketed,
                                 read_tagged_corpus_file, read_treebank,
                                 write_treebank)

FAST_TRAIN = "[train]\nepochs = 4\nbatch_size = 8\n"
TINY_MODEL = ("[model]\nmodel_dim = 16\nnum_layers = 1\nnum_heads = 2\n"
              "head_dim = 4\nff_dim = 16\nlabel_hidden_dim = 12\nmax_len = 32\n")


def write_config(tmp_path, extra=""):
    toy = data.toy_treebank_path()
    config = tmp_path / "run.ini"
    config.write_text(
        "[paths]\n"
        f"train_treebank = {toy}\n"
        f"gold_treebank = {toy}\n"
        f"checkpoint = {tmp_path}/out/parser.ckpt\n"
        f"train_log = {tmp_path}/out/train.log\n"
        f"parse_output = {tmp_path}/out/pred.brackets\n"
        f"report = {tmp_path}/out/eval.report\n"
        "[mode]\nuse_gold_tags = true\n"
        + FAST_TRAIN + TINY_MODEL + extra)
    return config


def test_train_parse_eval_pipeline(tmp_path, capsys):
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config)]) == 0
    assert (tmp_path / "out/parser.ckpt").exists()
    assert (tmp_path / "out/parser.ckpt.manifest").exists()
    assert len((tmp_path / "out/train.log").read_text().splitlines()) == 4

    assert cli.main(["parse", "--config", str(config)]) == 0
    predictions = read_treebank(tmp_path / "out/pred.brackets")
    assert len(predictions) == 50
    gold = read_treebank(data.toy_treebank_path())
    for g, p in zip(gold, predictions):
        assert p.leaf_tokens() == g.leaf_tokens()  # re-lexicalization contract

    assert cli.main(["eval", "--config", str(config),
                     "--pred-treebank", f"{tmp_path}/out/pred.brackets"]) == 0
    summary = capsys.readouterr().out.strip().splitlines()[-1]
    parts = summary.split()
    assert len(parts) == 4
    for part in parts:
        assert len(part.split(".")[1]) == 2  # two decimals


def test_eval_overfit_predictions_against_toy_gold(tmp_path, capsys):
    # desk-preset model, enough epochs to memorize the toy treebank
    toy = data.toy_treebank_path()
    config = tmp_path / "run.ini"
    config.write_text(
        "[paths]\n"
        f"train_treebank = {toy}\n"
        f"gold_treebank = {toy}\n"
        f"checkpoint = {tmp_path}/parser.ckpt\n"
        f"parse_output = {tmp_path}/pred.brackets\n"
        f"report = {tmp_path}/eval.report\n"
        "[mode]\nuse_gold_tags = true\n"
        "[train]\nepochs = 15\n")
    assert cli.main(["train", "--config", str(config)]) == 0
    assert cli.main(["parse", "--config", str(config)]) == 0
    assert cli.main(["delex", "--treebank", str(toy), "--strip-only",
                     "--delex-output", f"{tmp_path}/gold_stripped.brackets"]) == 0
    assert cli.main(["eval", "--config", str(config),
                     "--gold-treebank", f"{tmp_path}/gold_stripped.brackets",
                     "--pred-treebank", f"{tmp_path}/pred.brackets"]) == 0
    summary = capsys.readouterr().out.strip().splitlines()[-1]
    fscore = float(summary.split()[2])
    assert fscore >= 99.00


def test_eval_gold_vs_itself(tmp_path, capsys):
    toy = data.toy_treebank_path()
    assert cli.main(["eval", "--gold-treebank", str(toy),
                     "--pred-treebank", str(toy),
                     "--report", f"{tmp_path}/self.report"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == \
        "100.00 100.00 100.00 100.00"


def test_eval_length_mismatch_exits_2(tmp_path, capsys):
    toy = data.toy_treebank_path()
    short = tmp_path / "short.brackets"
    write_treebank(read_treebank(toy)[:10], short)
    code = cli.main(["eval", "--gold-treebank", str(toy),
                     "--pred-treebank", str(short),
                     "--report", f"{tmp_path}/x.report"])
    assert code == 2
    assert "stage=eval" in capsys.readouterr().err


def test_missing_treebank_exits_2(tmp_path, capsys):
    code = cli.main(["train", "--train-treebank", f"{tmp_path}/nope.brackets",
                     "--checkpoint", f"{tmp_path}/out.ckpt"])
    assert code == 2
    assert "stage=load" in capsys.readouterr().err


def test_lexicalized_mode_distinct_checkpoint(tmp_path):
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config)]) == 0
    delexicalized = (tmp_path / "out/parser.ckpt").read_bytes()
    assert cli.main(["train", "--config", str(config), "--mode", "lexicalized"]) == 0
    lexicalized = (tmp_path / "out/parser.ckpt").read_bytes()
    assert delexicalized != lexicalized
    header = json.loads(lexicalized[16:16 + int.from_bytes(lexicalized[8:16], "little")])
    assert "der" in header["pos_vocab"]  # word types, not tags


def test_lexicalized_end_to_end_quality(tmp_path, capsys):
    config = write_config(tmp_path, extra="")
    assert cli.main(["train", "--config", str(config),
                     "--mode", "lexicalized"]) == 0
    # dev selection stays meaningful: punctuation matches after the output
    # preterminals are restored from the reference tags
    final = (tmp_path / "out/train.log").read_text().splitlines()[-1]
    assert float(final.split("\t")[2]) > 0.0
    assert cli.main(["parse", "--config", str(config),
                     "--mode", "lexicalized"]) == 0
    predictions = read_treebank(tmp_path / "out/pred.brackets")
    gold = read_treebank(data.toy_treebank_path())
    assert len(predictions) == len(gold)
    for g, p in zip(gold, predictions):
        assert p.leaf_tokens() == g.leaf_tokens()
        assert [q.label for q in p.preterminals()] == \
            [ExtendedTag.parse(q.label).pos for q in g.preterminals()]


def test_no_morph_flag_changes_parser_input(tmp_path):
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config), "--no-morph"]) == 0
    assert cli.main(["parse", "--config", str(config), "--no-morph"]) == 0
    predictions = read_treebank(tmp_path / "out/pred.brackets")
    assert len(predictions) == 50
    header_bytes = (tmp_path / "out/parser.ckpt").read_bytes()
    header = json.loads(header_bytes[16:16 + int.from_bytes(header_bytes[8:16], "little")])
    assert header["feature_vocab"] == ["<UNK>"]


def test_tag_train_and_apply(tmp_path):
    corpus = tmp_path / "train.tags"
    corpus.write_text("der\tART.Nom\nMann\tNN.Nom\nlacht\tVVFIN\n\n"
                      "die\tART.Akk\nFrau\tNN.Akk\n\n", encoding="utf-8")
    tokens = tmp_path / "raw.txt"
    tokens.write_text("der Mann lacht\ndie Frau\n", encoding="utf-8")
    assert cli.main(["tag", "--train-corpus", str(corpus),
                     "--tagger-model", f"{tmp_path}/tagger.txt",
                     "--tokens", str(tokens),
                     "--tagged-output", f"{tmp_path}/out.tags"]) == 0
    sentences = read_tagged_corpus_file(tmp_path / "out.tags")
    assert [len(s) for s in sentences] == [3, 2]
    assert sentences[0].tags[0].serialized() == "ART.Nom"


def test_map_tags_roundtrip(tmp_path):
    corpus = tmp_path / "hist.tags"
    corpus.write_text("diu\tDDART.Nom.Sg.Fem\nfrouwe\tNA.Nom.Sg.Fem\n\n",
                      encoding="utf-8")
    assert cli.main(["map-tags", "--tagged-corpus", str(corpus),
                     "--tagged-output", f"{tmp_path}/mapped.tags"]) == 0
    mapped = read_tagged_corpus_file(tmp_path / "mapped.tags")
    assert mapped[0].tags[0].serialized() == "ART.Nom.Sg.Fem"
    assert mapped[0].tags[1].serialized() == "NN.Nom.Sg.Fem"


def test_delex_treebank_and_strip_only(tmp_path):
    toy = data.toy_treebank_path()
    assert cli.main(["delex", "--treebank", str(toy),
                     "--delex-output", f"{tmp_path}/delexed.brackets"]) == 0
    delexed = read_treebank(tmp_path / "delexed.brackets")
    for tree in delexed:
        for pret in tree.preterminals():
            token = pret.children[0].token
            assert token == pret.label or token.startswith(pret.label + ".")
    assert cli.main(["delex", "--treebank", str(toy), "--strip-only",
                     "--delex-output", f"{tmp_path}/stripped.brackets"]) == 0
    stripped = read_treebank(tmp_path / "stripped.brackets")
    assert stripped[0].leaf_tokens() == read_treebank(toy)[0].leaf_tokens()


def test_delex_tagged_corpus(tmp_path):
    corpus = tmp_path / "x.tags"
    corpus.write_text("a\tNN.Nom\nb\tVVFIN\n\n", encoding="utf-8")
    assert cli.main(["delex", "--tagged-corpus", str(corpus),
                     "--delex-output", f"{tmp_path}/out.txt"]) == 0
    assert (tmp_path / "out.txt").read_text() == "NN.Nom VVFIN\n"


def test_filter_command(tmp_path):
    trees = [parse_bracketed("(S (NN Tag) (NN Nacht))")[0],
             parse_bracketed("(S (FM laudamus) (FM te) (NN x))")[0],
             parse_bracketed("(S (NN kurz))")[0]]
    source = tmp_path / "raw.brackets"
    write_treebank(trees, source)
    lexicon = tmp_path / "latin.txt"
    lexicon.write_text("laudamus\nte\n", encoding="utf-8")
    assert cli.main(["filter", "--treebank", str(source),
                     "--latin-lexicon", str(lexicon),
                     "--filtered-treebank", f"{tmp_path}/kept.brackets",
                     "--filter-report", f"{tmp_path}/filter.report"]) == 0
    kept = read_treebank(tmp_path / "kept.brackets")
    assert len(kept) == 1
    report = (tmp_path / "filter.report").read_text().splitlines()
    assert len(report) == 2


def test_manifest_contents(tmp_path):
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config)]) == 0
    manifest = json.loads((tmp_path / "out/parser.ckpt.manifest").read_text())
    assert manifest["command"] == "train"
    assert manifest["config"]["mode"] == "delexicalized"
    entry = manifest["inputs"]["train_treebank"]
    assert len(entry["sha256"]) == 64
    assert any(path.endswith("parser.ckpt") for path in manifest["outputs"])


def test_seed_flag_overrides_all_seeds(tmp_path):
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config), "--seed", "99"]) == 0
    manifest = json.loads((tmp_path / "out/parser.ckpt.manifest").read_text())
    assert manifest["config"]["model"]["seed"] == 99
    assert manifest["config"]["train"]["seed"] == 99


def test_mapping_is_identity_on_target_inventory(tmp_path):
    # toy treebank tags are already modern-inventory tags, so parsing with
    # and without mapping produces identical trees
    config = write_config(tmp_path)
    assert cli.main(["train", "--config", str(config)]) == 0
    assert cli.main(["parse", "--config", str(config)]) == 0
    mapped = (tmp_path / "out/pred.brackets").read_bytes()
    assert cli.main(["parse", "--config", str(config), "--no-mapping"]) == 0
    unmapped = (tmp_path / "out/pred.brackets").read_bytes()
    assert mapped == unmapped


def test_use_gold_tags_requires_gold_treebank(tmp_path, capsys):
    code = cli.main(["parse", "--use-gold-tags",
                     "--checkpoint", f"{tmp_path}/none.ckpt",
                     "--parse-output", f"{tmp_path}/out.brackets"])
    assert code == 2
    assert "stage=load" in capsys.readouterr().err
