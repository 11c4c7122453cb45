import numpy as np
import pytest

import oracles
from delexparse import chart, model
from delexparse.transform import EMPTY_LABEL, binarize
from delexparse.treebank import ExtendedTag, parse_bracketed

TINY = model.ModelConfig(model_dim=8, num_layers=1, num_heads=2, head_dim=3,
                         ff_dim=10, label_hidden_dim=6, max_len=16, seed=3)
POS = [model.UNK, "ART", "NN", "VVFIN"]
FEATS = [model.UNK, "Nom", "Acc", "Sg"]
LABELS = [EMPTY_LABEL, "NP", "S", "VP"]


def tiny_params(seed=3, layers=1):
    cfg = model.ModelConfig(model_dim=8, num_layers=layers, num_heads=2,
                            head_dim=3, ff_dim=10, label_hidden_dim=6,
                            max_len=16, seed=seed)
    return model.init_params(cfg, POS, FEATS, LABELS)


def tags(*specs):
    return [ExtendedTag.parse(s) for s in specs]


def test_config_validation():
    with pytest.raises(model.ModelError):
        model.ModelConfig(model_dim=7)
    with pytest.raises(model.ModelError):
        model.ModelConfig(num_heads=0)


def test_embed_no_features_is_pos_plus_position():
    params = tiny_params()
    x = model.embed_sequence(params, tags("NN"))
    expected = params.tensors["pos_embedding"][POS.index("NN")] + \
        params.tensors["position_encoding"][0]
    np.testing.assert_array_equal(x[0], expected)


def test_embed_features_change_embedding():
    params = tiny_params()
    a = model.embed_sequence(params, tags("NN.Nom"))
    b = model.embed_sequence(params, tags("NN.Acc"))
    assert not np.array_equal(a, b)


def test_embed_unknown_pos_uses_unk_row():
    params = tiny_params()
    x = model.embed_sequence(params, [ExtendedTag("XYZ")])
    expected = params.tensors["pos_embedding"][0] + \
        params.tensors["position_encoding"][0]
    np.testing.assert_array_equal(x[0], expected)


def test_embed_rejects_overlong():
    params = tiny_params()
    with pytest.raises(model.ModelError):
        model.embed_sequence(params, [ExtendedTag("NN")] * 17)


def test_encode_shapes_and_determinism():
    params = tiny_params()
    x = model.embed_sequence(params, tags("ART", "NN", "VVFIN"))
    fence = model.encode(params, x)
    assert fence.shape == (4, 8)
    np.testing.assert_array_equal(fence, model.encode(params, x))
    single = model.encode(params, model.embed_sequence(params, tags("NN")))
    assert single.shape == (2, 8)


def test_encode_zero_layers_builds_fenceposts_from_embeddings():
    params = tiny_params(layers=0)
    x = model.embed_sequence(params, tags("ART", "NN"))
    fence = model.encode(params, x)
    half = 4
    boundary = params.tensors["boundary"]
    np.testing.assert_array_equal(fence[0, :half], boundary[0, :half])
    np.testing.assert_array_equal(fence[0, half:], x[0, half:])
    np.testing.assert_array_equal(fence[2, :half], x[1, :half])
    np.testing.assert_array_equal(fence[2, half:], boundary[1, half:])


def test_span_scores_shape_and_empty_column():
    params = tiny_params()
    x = model.embed_sequence(params, tags("ART", "NN", "VVFIN"))
    scores = model.span_scores(params, model.encode(params, x))
    assert scores.shape == (3, 4, 4)
    starts, ends = np.triu_indices(4, k=1)
    np.testing.assert_array_equal(scores[starts, ends, 0], 0.0)


def test_init_determinism():
    a = tiny_params(seed=5)
    b = tiny_params(seed=5)
    c = tiny_params(seed=6)
    for name in a.tensors:
        np.testing.assert_array_equal(a.tensors[name], b.tensors[name])
    assert any(not np.array_equal(a.tensors[n], c.tensors[n]) for n in a.tensors)


def gold_tree():
    return binarize(parse_bracketed(
        "(S (NP (ART ART.Nom) (NN NN.Nom.Sg)) (VVFIN VVFIN))")[0])


def test_augmented_decode_returns_dominant_gold():
    # gold spans scored 10 above every alternative labeling: the
    # augmentation (at most +1 per span) cannot flip any decision, so the
    # loss-augmented decode returns gold and the hinge sits at zero
    gold = gold_tree()
    gold_spans, _ = chart.tree_spans(gold)
    idx = {label: i for i, label in enumerate(LABELS)}
    test_scores = np.full((3, 4, len(LABELS)), -10.0)
    starts, ends = np.triu_indices(4, k=1)
    test_scores[starts, ends, 0] = 0.0
    for i, j, label in gold_spans:
        if label != EMPTY_LABEL:
            test_scores[i, j, idx[label]] = 10.0
    augment = chart.hamming_augment(
        3, len(LABELS), chart.spans_to_indices(gold_spans, LABELS))
    aug_total, spans = chart.decode_spans(test_scores + augment)
    decoded = {(i, j, l) for i, j, l in spans if l != 0}
    expected = {(i, j, idx[l]) for i, j, l in gold_spans if l != EMPTY_LABEL}
    assert decoded == expected
    gold_total = sum(test_scores[i, j, idx[l]]
                     for i, j, l in gold_spans if l != EMPTY_LABEL)
    assert aug_total - gold_total == 0.0


def test_loss_nonnegative_and_zero_grads_at_zero_loss():
    params = tiny_params()
    sentence = tags("ART.Nom", "NN.Nom.Sg", "VVFIN")
    gold = gold_tree()
    for seed in range(5):
        p = tiny_params(seed=seed)
        loss, grads = model.loss_and_gradients(p, sentence, gold)
        assert loss >= 0.0
        if loss == 0.0:
            assert all(not g.any() for g in grads.values())


def test_loss_leaf_count_mismatch():
    params = tiny_params()
    with pytest.raises(model.ModelError):
        model.loss_and_gradients(params, tags("NN"), gold_tree())


def test_score_invariant_to_span_order():
    params = tiny_params()
    sentence = tags("ART.Nom", "NN.Nom.Sg", "VVFIN")
    scores = model.sentence_scores(params, sentence)
    spans, _ = chart.tree_spans(gold_tree())
    idx = chart.spans_to_indices(spans, LABELS)
    forward = sum(scores[i, j, l] for i, j, l in idx if l)
    backward = sum(scores[i, j, l] for i, j, l in reversed(idx) if l)
    assert forward == pytest.approx(backward, abs=1e-12)


def test_span_score_gradient_finite_differences():
    # spot check on 5 random (i, j, l) entries, as a smooth objective
    params = tiny_params()
    sentence = tags("ART.Nom", "NN.Nom.Sg", "VVFIN", "NN")
    rng = np.random.default_rng(8)
    scores, caches = model.forward_scores(params, sentence)
    starts, ends = np.triu_indices(len(sentence) + 1, k=1)
    picks = rng.choice(len(starts), size=5, replace=False)
    for pick in picks:
        i, j = int(starts[pick]), int(ends[pick])
        l = int(rng.integers(1, len(LABELS)))
        dscores = np.zeros_like(scores)
        dscores[i, j, l] = 1.0
        grads = model.backward_scores(params, caches, dscores)

        def objective():
            return float(model.sentence_scores(params, sentence)[i, j, l])

        for name in ("label_w2", "layer_0/wq", "pos_embedding"):
            fd = oracles.fd_tensor_gradient(objective, params.tensors[name])
            err = np.linalg.norm(grads[name] - fd) / (np.linalg.norm(fd) + 1e-12)
            assert err < 1e-4, (name, err)


def test_total_loss_gradient_finite_differences():
    # hinge loss FD on 20 random parameters of a 3-token sentence,
    # skipping entries where the augmented decode flips within the step
    params = tiny_params(seed=12)
    sentence = tags("ART.Nom", "NN.Nom.Sg", "VVFIN")
    gold = gold_tree()
    loss, grads = model.loss_and_gradients(params, sentence, gold)
    assert loss > 0.0
    rng = np.random.default_rng(3)
    names = [n for n in params.tensors if params.tensors[n].size > 0]
    checked = 0
    step = 1e-5
    while checked < 20:
        name = names[rng.integers(len(names))]
        tensor = params.tensors[name]
        flat = int(rng.integers(tensor.size))
        index = np.unravel_index(flat, tensor.shape)
        original = tensor[index]
        values = []
        stable = True
        base_spans = _augmented_spans(params, sentence, gold)
        for delta in (step, -step):
            tensor[index] = original + delta
            if _augmented_spans(params, sentence, gold) != base_spans:
                stable = False
            values.append(model.loss_and_gradients(params, sentence, gold)[0])
        tensor[index] = original
        if not stable:
            continue
        fd = (values[0] - values[1]) / (2 * step)
        assert grads[name][index] == pytest.approx(fd, rel=1e-4, abs=1e-7)
        checked += 1


def _augmented_spans(params, sentence, gold):
    scores = model.sentence_scores(params, sentence)
    gold_spans, _ = chart.tree_spans(gold)
    augment = chart.hamming_augment(len(sentence), len(params.labels),
                                    chart.spans_to_indices(gold_spans, params.labels))
    _, spans = chart.decode_spans(scores + augment)
    return spans


def test_checkpoint_round_trip(tmp_path):
    params = tiny_params(seed=21)
    path = tmp_path / "model.ckpt"
    model.save_checkpoint(params, path)
    loaded = model.load_checkpoint(path)
    assert loaded.config == params.config
    assert loaded.labels == params.labels
    assert loaded.pos_names == params.pos_names
    assert loaded.feature_names == params.feature_names
    for name in params.tensors:
        np.testing.assert_array_equal(loaded.tensors[name], params.tensors[name])
    # byte-stable on re-save
    again = tmp_path / "model2.ckpt"
    model.save_checkpoint(loaded, again)
    assert path.read_bytes() == again.read_bytes()


def test_checkpoint_rejects_corruption(tmp_path):
    params = tiny_params()
    path = tmp_path / "model.ckpt"
    model.save_checkpoint(params, path)
    blob = bytearray(path.read_bytes())
    blob[-1] ^= 0xFF
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(bytes(blob))
    with pytest.raises(model.ModelError, match="checksum"):
        model.load_checkpoint(bad)
    bad2 = tmp_path / "bad2.ckpt"
    bad2.write_bytes(b"nope" + bytes(blob[4:]))
    with pytest.raises(model.ModelError, match="magic"):
        model.load_checkpoint(bad2)
