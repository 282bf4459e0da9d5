import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_ml_linear, brute_ml_rm1, dedup_golay, truth_table
from rmpapr.boolfn import BooleanFunction, Codeword, affine, codeword_of, degree
from rmpapr.rmcodes import (
    USER_NESTED,
    RECURSIVE_RAW,
    CodeSpec,
    GeneratorMatrix,
    bpsk,
    codeword_table,
    coset_soft_decode,
    encode,
    encode_many,
    enumerate_code,
    enumerate_golay,
    fht_decode_rm1,
    generator_b2,
    generator_b3,
    generator_recursive,
    generator_rm1,
    gf2_rank,
    golay_boolean,
    golay_table,
    message_bits,
    zero_tail,
)

G2_3 = [
    "11111111",
    "01010101",
    "00110011",
    "00001111",
    "00000101",
    "00000011",
]
G3_3 = G2_3 + ["00010001", "00000001"]


def as_rows(strings):
    return np.array([[int(c) for c in s] for s in strings], dtype=np.uint8)


def row_space(rows):
    rows = np.asarray(rows, dtype=np.int64)
    msgs = message_bits(np.arange(1 << rows.shape[0]), rows.shape[0]).astype(np.int64)
    return {w.tobytes() for w in ((msgs @ rows) % 2).astype(np.uint8)}


# --- generators ---------------------------------------------------------------


def test_rm1_small():
    assert np.array_equal(generator_rm1(1).rows, as_rows(["11", "01"]))
    assert np.array_equal(generator_rm1(3).rows, as_rows(G2_3[:4]))


def test_rm1_rows_are_affine_monomials():
    G = generator_rm1(5)
    assert np.array_equal(G.rows[0], codeword_of(BooleanFunction.constant(5)).bits)
    for i in range(5):
        v = np.zeros(5, dtype=int)
        v[i] = 1
        assert np.array_equal(G.rows[i + 1], codeword_of(affine(5, v, 0)).bits)


def test_nested_matrices_bit_exact():
    assert np.array_equal(generator_b2(3).rows, as_rows(G2_3))
    assert np.array_equal(generator_b3(3).rows, as_rows(G3_3))
    assert generator_b3(4).rows.shape == (12, 16)
    assert generator_b2(3).row_order_tag == USER_NESTED


@pytest.mark.parametrize("m", range(3, 8))
def test_nested_row_lists(m):
    def cw(*idx):
        return codeword_of(BooleanFunction.from_terms(m, [idx])).bits

    expected = [cw()] + [cw(i) for i in range(m)]
    expected += [cw(m - 1, i) for i in range(m - 1)]
    assert np.array_equal(generator_b2(m).rows, np.array(expected))
    expected += [cw(m - 2, i) for i in range(m - 2)]
    expected += [cw(m - 1, m - 2, i) for i in range(m - 2)]
    assert np.array_equal(generator_b3(m).rows, np.array(expected))


def test_generator_guards():
    with pytest.raises(ValueError):
        generator_b2(1)
    with pytest.raises(ValueError):
        generator_b3(2)
    with pytest.raises(ValueError):
        generator_recursive(4, 3)
    with pytest.raises(ValueError):
        GeneratorMatrix(np.ones((2, 4)), 2)
    with pytest.raises(ValueError):
        GeneratorMatrix(np.ones((1, 3)), 2)


def test_recursive_r1_is_rm1():
    for m in range(1, 7):
        assert np.array_equal(generator_recursive(1, m).rows, generator_rm1(m).rows)


def test_recursive_and_nested_span_same_space():
    assert row_space(generator_recursive(2, 3).rows) == row_space(generator_b2(3).rows)
    assert row_space(generator_recursive(3, 4).rows) == row_space(generator_b3(4).rows)
    assert generator_recursive(2, 3).row_order_tag == RECURSIVE_RAW


def test_recursive_r3_m4_within_rm34():
    for word in enumerate_code(generator_recursive(3, 4)):
        assert degree(BooleanFunction.from_codeword(word)) <= 3


@pytest.mark.parametrize("r", range(1, 6))
def test_parameter_table(r):
    for m in range(r, 9):
        spec = CodeSpec.b(r, m) if r > 1 else CodeSpec.rm1(m)
        W = (1 << (r - 1)) * (m - r + 2)
        G = generator_recursive(r, m)
        assert spec.W == W == G.W
        assert spec.K == 1 << m
        assert spec.rate == pytest.approx((1 << (r - 1)) * (m - r + 2) / (1 << m))
        assert spec.papr_bound == 2 ** (r - 1)
        assert spec.dmin_lower == 1 << (m - r)
        assert gf2_rank(G.rows) == W  # so the code has exactly 2^W codewords
        for row in G.rows:
            assert degree(BooleanFunction.from_codeword(Codeword(m, row))) <= r
        if W <= 12:
            assert len(row_space(G.rows)) == 1 << W


def test_codespec_lookup():
    assert CodeSpec.from_name("b3", 5) == CodeSpec.b(3, 5)
    assert CodeSpec.from_name("rm1", 4).W == 5
    g = CodeSpec.from_name("golay", 5)
    assert g.W == pytest.approx(5 + math.log2(120))
    assert not g.is_linear
    assert CodeSpec.from_name("rmmap", 3).rate == 1.0
    assert CodeSpec.b(4, 6).row_order == RECURSIVE_RAW
    with pytest.raises(ValueError):
        CodeSpec.b(4, 6, USER_NESTED)
    with pytest.raises(ValueError):
        CodeSpec.from_name("b9", 3)
    with pytest.raises(ValueError):
        CodeSpec.from_name("turbo", 3)
    with pytest.raises(ValueError):
        g.generator()


@pytest.mark.parametrize(
    "gen, bound",
    [(generator_b2(m), 1 << (m - 2)) for m in range(2, 6)] + [(generator_b3(m), 1 << (m - 3)) for m in range(3, 5)],
)
def test_minimum_distance_bound(gen, bound):
    words = codeword_table(gen).astype(np.int64)
    weights = words[1:].sum(axis=1)
    assert weights.min() >= bound
    if words.shape[0] <= 1024:
        # pairwise distances directly, without relying on linearity
        d = (words[:, None, :] != words[None, :, :]).sum(axis=2)
        np.fill_diagonal(d, 1 << 20)
        assert d.min() >= bound


# --- encoding -----------------------------------------------------------------


def test_encode_examples():
    G = generator_b2(3)
    assert str(encode([1, 0, 0, 0, 0, 0], G)) == "11111111"
    assert str(encode([0] * 6, G)) == "00000000"
    rows = as_rows(G2_3)
    expected = rows[0] ^ rows[1] ^ rows[3]
    assert np.array_equal(encode([1, 1, 0, 1, 0, 0], G).bits, expected)
    assert str(encode([1, 1, 0, 1, 0, 0], G)) == "10100101"


def test_encode_rejects_bad_length():
    with pytest.raises(ValueError):
        encode([1, 0, 1], generator_b2(3))
    with pytest.raises(ValueError):
        encode_many([[1, 0, 2, 0]], generator_rm1(3))


@pytest.mark.parametrize("gen", [generator_rm1(3), generator_b2(3), generator_b3(3), generator_b2(4)])
def test_encode_linear_exhaustive(gen):
    msgs = message_bits(np.arange(1 << gen.W), gen.W)
    words = encode_many(msgs, gen)
    for i in range(0, len(msgs), 3):
        for j in range(len(msgs)):
            assert np.array_equal(words[i ^ j], words[i] ^ words[j])


def test_enumerate_counts():
    rm = list(enumerate_code(CodeSpec.rm1(2)))
    assert len(rm) == 8
    assert {w.weight for w in rm} <= {0, 2, 4}
    assert len({w.bits.tobytes() for w in enumerate_code(CodeSpec.b(2, 3))}) == 64


def test_enumerate_b3_m5_degree():
    words = codeword_table(CodeSpec.b(3, 5))
    assert words.shape == (1 << 16, 32)
    assert len({w.tobytes() for w in words}) == 1 << 16
    # batched binary Moebius transform; degree <= 3 means every ANF
    # coefficient on a monomial of 4 or 5 variables vanishes
    anf = words.copy()
    for l in range(5):
        view = anf.reshape(anf.shape[0], -1, 2, 1 << l)
        view[:, :, 1, :] ^= view[:, :, 0, :]
    high = [i for i in range(32) if bin(i).count("1") > 3]
    assert not anf[:, high].any()
    for w in words[::4099]:
        assert degree(BooleanFunction.from_codeword(Codeword(5, w))) <= 3


def test_enumerate_guard():
    with pytest.raises(ValueError):
        next(enumerate_code(CodeSpec.b(4, 8, RECURSIVE_RAW)))


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_zero_tailed_messages_stay_first_order(m):
    for gen in (generator_b2(m), generator_b3(m) if m >= 3 else None):
        if gen is None:
            continue
        for w in range(1, m + 2):
            msgs = zero_tail(message_bits(np.arange(1 << w), w), gen.W)
            for word in encode_many(msgs, gen):
                assert degree(BooleanFunction.from_codeword(Codeword(m, word))) <= 1


def test_zero_tail():
    assert np.array_equal(zero_tail([1, 1], 4), [1, 1, 0, 0])
    with pytest.raises(ValueError):
        zero_tail([1, 0, 1], 2)


# --- Golay family -------------------------------------------------------------


def test_golay_boolean_examples():
    f = golay_boolean(2, (0, 1), (0, 0), 0)
    assert f == BooleanFunction.from_terms(2, [(0, 1)])
    g = golay_boolean(3, (0, 1, 2), (0, 0, 0), 0)
    assert degree(g) == 2
    assert g == BooleanFunction.from_terms(3, [(0, 1), (1, 2)])


def test_golay_boolean_m4_against_truth_table():
    f = golay_boolean(4, (2, 0, 3, 1), (1, 0, 0, 1), 1)
    expected = truth_table(lambda x0, x1, x2, x3: x2 * x0 + x0 * x3 + x3 * x1 + x0 + x3 + 1, 4)
    assert np.array_equal(codeword_of(f).bits, expected)


def test_golay_boolean_rejects_bad_perm():
    with pytest.raises(ValueError):
        golay_boolean(3, (0, 0, 1), (0, 0, 0), 0)


@pytest.mark.parametrize("m, count", [(2, 8), (3, 48), (4, 384), (5, 3840)])
def test_golay_counts(m, count):
    table = golay_table(m)
    assert table.shape == (count, 1 << m)
    assert count == (1 << (m + 1)) * math.factorial(m) // 2
    if m <= 4:
        assert {w.tobytes() for w in table} == dedup_golay(m)
    assert len({w.tobytes() for w in table}) == count


def test_golay_m5_matches_bruteforce_dedup():
    table = golay_table(5)
    assert {w.tobytes() for w in table} == dedup_golay(5)
    assert sum(1 for _ in enumerate_golay(3)) == 48


def test_golay_guard():
    with pytest.raises(ValueError):
        golay_table(8)


# --- BPSK and decoders --------------------------------------------------------


def test_bpsk_examples():
    assert np.array_equal(bpsk(Codeword(2, (0, 0, 0, 0))), [1, 1, 1, 1])
    assert np.array_equal(bpsk(Codeword(2, (0, 1, 0, 1))), [1, -1, 1, -1])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_bpsk_parity(bits):
    assert np.prod(bpsk(bits)) == (-1) ** sum(bits)


@pytest.mark.parametrize("m", range(1, 7))
def test_fht_noiseless(m):
    G = generator_rm1(m)
    msgs = message_bits(np.arange(1 << (m + 1)), m + 1)
    decoded, corr = fht_decode_rm1(bpsk(encode_many(msgs, G)))
    assert np.array_equal(decoded, msgs)
    assert np.allclose(corr, np.sqrt(1 << m))


def test_fht_single_flip_m3_exhaustive():
    G = generator_rm1(3)
    for idx in range(16):
        msg = message_bits(idx, 4)
        clean = bpsk(encode(msg, G))
        for j in range(8):
            r = clean.copy()
            r[j] *= -1
            assert np.array_equal(fht_decode_rm1(r)[0], msg)
            assert np.array_equal(brute_ml_rm1(r), msg)


def test_fht_zero_input_tie_break():
    msg, corr = fht_decode_rm1(np.zeros(8))
    assert np.array_equal(msg, np.zeros(4))
    assert corr == 0.0


def test_fht_rejects_bad_length():
    with pytest.raises(ValueError):
        fht_decode_rm1(np.ones(6))


def test_fht_matches_brute_force_ml():
    rng = np.random.default_rng(2024)
    for trial in range(2000):
        m = int(rng.integers(1, 7))
        r = rng.standard_normal(1 << m) * 1.5 + bpsk(rng.integers(0, 2, 1 << m))
        assert np.array_equal(fht_decode_rm1(r)[0], brute_ml_rm1(r)), trial


def test_coset_noiseless_b3_m3_exhaustive():
    G = generator_b3(3)
    msgs = message_bits(np.arange(256), 8)
    rcv = bpsk(encode_many(msgs, G))
    assert np.array_equal(coset_soft_decode(rcv, G), msgs)
    assert np.array_equal(coset_soft_decode(3.7 * rcv, CodeSpec.b(3, 3)), msgs)
    for msg, r in zip(msgs[::17], rcv[::17]):
        assert np.array_equal(coset_soft_decode(r, G), msg)


def test_coset_single_flip_b2_m4_exhaustive():
    G = generator_b2(4)
    msgs = message_bits(np.arange(256), 8)
    clean = bpsk(encode_many(msgs, G))
    for j in range(16):
        r = clean.copy()
        r[:, j] *= -1
        assert np.array_equal(coset_soft_decode(r, G), msgs)
    for msg, word in zip(msgs[::31], clean[::31]):
        r = word.copy()
        r[5] *= -1
        assert np.array_equal(brute_ml_linear(r, G.rows), msg)


def test_coset_matches_brute_force_ml_noisy():
    rng = np.random.default_rng(77)
    for gen in (generator_b2(3), generator_b3(4), generator_b2(5)):
        msgs = rng.integers(0, 2, (200, gen.W))
        r = bpsk(encode_many(msgs, gen)) + rng.standard_normal((200, gen.K))
        decoded = coset_soft_decode(r, gen)
        for i in range(200):
            assert np.array_equal(decoded[i], brute_ml_linear(r[i], gen.rows))


def test_coset_rejects_wrong_layout():
    with pytest.raises(ValueError):
        coset_soft_decode(np.ones(16), generator_recursive(3, 4))
    with pytest.raises(ValueError):
        coset_soft_decode(np.ones(16), generator_b2(3))


@settings(max_examples=40)
@given(st.integers(0, 2**63 - 1), st.floats(0.01, 100))
def test_coset_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    G = generator_b3(4)
    r = rng.standard_normal(16)
    assert np.array_equal(coset_soft_decode(r, G), coset_soft_decode(scale * r, G))


@settings(max_examples=40)
@given(st.integers(0, 2**63 - 1))
def test_rm1_codewords_form_a_group(seed):
    rng = np.random.default_rng(seed)
    G = generator_rm1(4)
    a, b = rng.integers(0, 2, (2, 5))
    assert encode(a ^ b, G) == encode(a, G) ^ encode(b, G)


def test_gf2_rank():
    assert gf2_rank(np.eye(4, dtype=np.uint8)) == 4
    assert gf2_rank(np.array([[1, 1], [1, 1]])) == 1
    assert gf2_rank(np.zeros((3, 3))) == 0
    for m in range(2, 6):
        full = np.array(list(itertools.product((0, 1), repeat=m)))
        assert gf2_rank(full) == m
