import string

import numpy as np
import pytest

from entlink import nn
from entlink.errors import EmptyName, EmptyWord, ShapeMismatch
from entlink.surface import CharVocab, SurfaceConfig, SurfaceEncoder, encode_surface, encode_word


@pytest.fixture
def enc():
    return SurfaceEncoder.init(SurfaceConfig(), nn.make_rng(3))


def zero_encoder(cfg=SurfaceConfig(), pool_bias=None):
    pool_bias = np.zeros(cfg.surface_dim) if pool_bias is None else pool_bias
    return SurfaceEncoder(
        cfg,
        np.zeros((len(CharVocab()), cfg.char_dim)),
        nn.DenseLayer.zeros(cfg.max_chars * cfg.char_dim, cfg.word_dim, "tanh"),
        nn.DenseLayer(np.zeros((cfg.surface_dim, cfg.word_dim)), pool_bias, "tanh"),
    )


def test_vocab_maps_every_character():
    v = CharVocab()
    assert len(v) == 41
    assert v["a"] == 0 and v["."] == 39
    for ch in ("é", "!", "Z", "中"):
        assert v[ch] == v.oov


def test_zero_params_give_zero_word():
    e = zero_encoder()
    assert not encode_word(e, "adam").any()


def test_zero_params_surface_is_pool_bias_through_tanh():
    b = np.linspace(-2, 2, 32)
    e = zero_encoder(pool_bias=b)
    np.testing.assert_array_equal(encode_surface(e, "joe adam"), np.tanh(b))


def test_determinism(enc):
    again = SurfaceEncoder.init(SurfaceConfig(), nn.make_rng(3))
    assert encode_word(enc, "adam").tobytes() == encode_word(enc, "adam").tobytes()
    assert encode_word(enc, "adam").tobytes() == encode_word(again, "adam").tobytes()


def test_truncation_uses_prefix_only():
    cfg = SurfaceConfig(max_chars=8)
    e = SurfaceEncoder.init(cfg, nn.make_rng(5))
    # words sharing their first 8 characters encode identically
    assert np.array_equal(encode_word(e, "adamadamadam"), encode_word(e, "adamadamxyz"))
    assert np.array_equal(encode_word(e, "adamadamadam"), encode_word(e, "adamadam"))
    assert not np.array_equal(encode_word(e, "adam"), encode_word(e, "adamadam"))


def test_single_word_surface_is_pool_of_word(enc):
    w = encode_word(enc, "adam")
    expected = nn.dense_forward(enc.entity_pool, w)
    np.testing.assert_allclose(encode_surface(enc, "adam"), expected, rtol=0, atol=1e-15)


def test_permutation_invariance(enc):
    np.testing.assert_allclose(encode_surface(enc, "adam joe"), encode_surface(enc, "joe adam"),
                               rtol=0, atol=1e-15)


def test_max_words_truncation(enc):
    long = "a b c d e f g h"
    assert np.array_equal(encode_surface(enc, long), encode_surface(enc, "a b c d e f"))


@pytest.mark.parametrize("name", ["a", "x" * 40, "one two three four five six seven eight", "é!?"])
def test_shape_contract(enc, name):
    assert encode_surface(enc, name).shape == (32,)
    assert encode_word(enc, name.split()[0]).shape == (32,)


def test_errors(enc):
    with pytest.raises(EmptyWord):
        encode_word(enc, "")
    with pytest.raises(EmptyName):
        encode_surface(enc, "   ")
    with pytest.raises(ShapeMismatch):
        SurfaceEncoder(SurfaceConfig(char_dim=8), enc.char_table.value, enc.word_proj, enc.entity_pool)


def test_pad_row_never_trained(enc):
    idx, mask = enc.index_names(["jo", "adam smith"])
    nn.backward(nn.total(enc.forward(idx, mask)))
    # only characters that occur receive gradient; pad (index -1) has no row at all
    used = {enc.vocab[c] for c in "joadamsmith"}
    grads = np.abs(enc.char_table.grad).sum(axis=1)
    assert all(grads[i] == 0 for i in range(len(enc.vocab)) if i not in used)


def test_gradient_check(enc):
    idx, mask = enc.index_names(["joe adam", "elon musk", "x", "jeffrey preston bezos"])
    target = nn.make_rng(0).normal(size=(4, 32))
    err = nn.grad_check(lambda: nn.squared_error(enc.forward(idx, mask), target),
                        enc.parameters(), 1e-5, max_coords=3000, rng=nn.make_rng(1))
    assert err < 1e-4


def test_roundtrip(enc):
    again = SurfaceEncoder.from_dict(enc.to_dict())
    assert np.array_equal(encode_surface(again, "joe adam"), encode_surface(enc, "joe adam"))


def _first_char_pairs(rng, n_each=50):
    """Name pairs labeled 1 when both names start in the same half of the alphabet."""
    first, second = string.ascii_lowercase[:13], string.ascii_lowercase[13:]

    def name(half):
        return half[rng.integers(13)] + "".join(rng.choice(list(string.ascii_lowercase), size=rng.integers(3, 7)))

    pairs = []
    for label in (1, 0):
        for i in range(n_each):
            a_half = first if i % 2 else second
            b_half = a_half if label else (second if i % 2 else first)
            pairs.append((name(a_half), name(b_half), label))
    return pairs


def test_trainable_on_first_character_class():
    rng = nn.make_rng(42)
    pairs = _first_char_pairs(rng)
    cfg = SurfaceConfig()
    enc = SurfaceEncoder.init(cfg, rng)
    hidden = nn.DenseLayer.init(rng, 2 * cfg.surface_dim, 32, "relu")
    out = nn.DenseLayer.init(rng, 32, 1, "sigmoid")
    params = enc.parameters() + hidden.parameters() + out.parameters()
    a_idx, a_mask = enc.index_names([a for a, _, _ in pairs])
    b_idx, b_mask = enc.index_names([b for _, b, _ in pairs])
    y = np.array([lab for _, _, lab in pairs], float)

    def predict(rows):
        s = nn.concat([enc.forward(a_idx[rows], a_mask[rows]), enc.forward(b_idx[rows], b_mask[rows])])
        return nn.reshape(out(hidden(s)), (len(rows),))

    accuracy = 0.0
    for _ in range(200):
        order = rng.permutation(len(pairs))
        for start in range(0, len(order), 10):
            rows = order[start:start + 10]
            nn.backward(nn.mean(nn.bce(predict(rows), y[rows])))
            nn.sgd_step(params, 0.1)
        accuracy = float(np.mean((predict(np.arange(len(pairs))).value > 0.5) == y))
        if accuracy >= 0.95:
            break
    assert accuracy >= 0.95
