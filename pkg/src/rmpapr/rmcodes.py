"""Reed-Muller subcodes for peak power control, their encoders and decoders.

Codes covered: the first-order code R(1, m), the recursive subcodes B_r^(m)
(dimension ``2**(r-1) * (m-r+2)``), the Golay-complementary coset family and
the rate-one Reed-Muller mapping B_m^(m).  Messages and codewords are uint8
arrays; codeword bit ``j`` is the value of the code's Boolean function at the
LSB-first point ``j``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .boolfn import BooleanFunction, Codeword, variable_rows
from .transform import fwht

USER_NESTED = "user_nested"
RECURSIVE_RAW = "recursive_raw"
ROW_ORDERS = (USER_NESTED, RECURSIVE_RAW)

MAX_ENUM_DIMENSION = 24
MAX_GOLAY_M = 7


def gf2_rank(rows: np.ndarray) -> int:
    """Rank over GF(2) of a 0/1 matrix."""
    packed = [int("".join(map(str, r[::-1].tolist())) or "0", 2) for r in np.asarray(rows, dtype=np.uint8)]
    rank = 0
    basis: dict[int, int] = {}
    for v in packed:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                rank += 1
                break
    return rank


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    rows: np.ndarray
    m: int
    row_order_tag: str = RECURSIVE_RAW

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.uint8)
        if rows.ndim != 2 or rows.shape[1] != 1 << self.m:
            raise ValueError(f"rows must be a W x {1 << self.m} matrix, got shape {rows.shape}")
        if not np.all(rows <= 1):
            raise ValueError("generator entries must be 0 or 1")
        if self.row_order_tag not in ROW_ORDERS:
            raise ValueError(f"unknown row order {self.row_order_tag!r}")
        if gf2_rank(rows) != rows.shape[0]:
            raise ValueError("generator rows are linearly dependent over GF(2)")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def W(self) -> int:
        return self.rows.shape[0]

    @property
    def K(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return (self.m, self.row_order_tag) == (other.m, other.row_order_tag) and np.array_equal(
            self.rows, other.rows
        )

    def __hash__(self) -> int:
        return hash((self.m, self.row_order_tag, self.rows.tobytes()))


@dataclass(frozen=True)
class CodeSpec:
    """Parameters of one code family member.

    ``W`` is the number of information bits (real-valued for the Golay family,
    where it is informational only), ``K = 2**m`` the codeword length and
    ``papr_bound`` the maximum PAPR of a fully loaded, Walsh-Hadamard spread
    signal with ``N = 1``.  ``family == "uncoded"`` is the on-demand
    assignment baseline: user bits go straight to spreading sequences.
    """

    family: str
    r: int
    m: int
    W: float
    K: int
    rate: float
    papr_bound: float
    dmin_lower: int
    row_order: str = USER_NESTED

    @classmethod
    def rm1(cls, m: int) -> "CodeSpec":
        _check_rm(1, m)
        return cls("RM1", 1, m, m + 1, 1 << m, (m + 1) / (1 << m), 1.0, 1 << (m - 1))

    @classmethod
    def b(cls, r: int, m: int, row_order: str | None = None) -> "CodeSpec":
        _check_rm(r, m)
        if row_order is None:
            row_order = USER_NESTED if r <= 3 else RECURSIVE_RAW
        _check_order(r, row_order)
        W = (1 << (r - 1)) * (m - r + 2)
        return cls("B_r", r, m, W, 1 << m, W / (1 << m), float(1 << (r - 1)), 1 << (m - r), row_order)

    @classmethod
    def rm_full_map(cls, m: int, row_order: str | None = None) -> "CodeSpec":
        inner = cls.b(m, m, row_order)
        return cls("RM_full_map", m, m, inner.W, inner.K, 1.0, inner.papr_bound, 1, inner.row_order)

    @classmethod
    def golay(cls, m: int) -> "CodeSpec":
        if m < 2:
            raise ValueError("the Golay family needs m >= 2")
        W = m + math.log2(math.factorial(m))
        return cls("Golay", 2, m, W, 1 << m, W / (1 << m), float(2 ** (m - m // 2)), 1 << (m - 2))

    @classmethod
    def uncoded(cls, m: int) -> "CodeSpec":
        return cls("uncoded", 0, m, 1 << m, 1 << m, 1.0, math.inf, 1)

    @classmethod
    def from_name(cls, name: str, m: int, row_order: str | None = None) -> "CodeSpec":
        """Look up a code by short name: rm1, b<r>, golay, rmmap or uncoded."""
        key = name.lower().replace("_", "")
        if key in ("rm1", "r1", "b1"):
            return cls.rm1(m)
        if key in ("golay", "bc"):
            return cls.golay(m)
        if key in ("rmmap", "rmfullmap"):
            return cls.rm_full_map(m, row_order)
        if key in ("uncoded", "wh", "none"):
            return cls.uncoded(m)
        if key.startswith("b") and key[1:].isdigit():
            return cls.b(int(key[1:]), m, row_order)
        raise ValueError(f"unknown code {name!r}")

    @property
    def is_linear(self) -> bool:
        return self.family in ("RM1", "B_r", "RM_full_map")

    @property
    def name(self) -> str:
        if self.family == "B_r":
            return f"B_{self.r}^({self.m})"
        return f"{self.family}^({self.m})"

    def generator(self) -> GeneratorMatrix:
        if not self.is_linear:
            raise ValueError(f"{self.family} codes have no generator matrix")
        if self.row_order == USER_NESTED:
            if self.r == 1:
                return generator_rm1(self.m)
            if self.r == 2:
                return generator_b2(self.m)
            return generator_b3(self.m)
        return generator_recursive(self.r, self.m)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "r": self.r,
            "m": self.m,
            "W": self.W,
            "K": self.K,
            "rate": self.rate,
            "papr_bound": None if math.isinf(self.papr_bound) else self.papr_bound,
            "dmin_lower": self.dmin_lower,
            "row_order": self.row_order,
        }


def _check_rm(r: int, m: int) -> None:
    if not (1 <= r <= m):
        raise ValueError(f"need 1 <= r <= m, got r={r}, m={m}")
    if m > 16:
        raise ValueError("m is capped at 16")


def _check_order(r: int, order: str) -> None:
    if order not in ROW_ORDERS:
        raise ValueError(f"unknown row order {order!r}")
    if order == USER_NESTED and r > 3:
        raise ValueError("the user-nested row order is only defined for r <= 3")


CodeLike = Union[CodeSpec, GeneratorMatrix]


def _as_generator(code: CodeLike) -> GeneratorMatrix:
    return code if isinstance(code, GeneratorMatrix) else code.generator()


# --- generator matrices -------------------------------------------------------


def generator_rm1(m: int) -> GeneratorMatrix:
    """Rows ``[1, x_0, ..., x_{m-1}]`` of R(1, m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rows = np.vstack([np.ones((1, 1 << m), dtype=np.uint8), variable_rows(m)])
    return GeneratorMatrix(rows, m, USER_NESTED)


def generator_recursive(r: int, m: int) -> GeneratorMatrix:
    """Apply ``r - 1`` doublings ``[[G, G], [0, G]]`` to the R(1, m-r+1) generator."""
    _check_rm(r, m)
    g = generator_rm1(m - r + 1).rows
    for _ in range(r - 1):
        z = np.zeros_like(g)
        g = np.block([[g, g], [z, g]])
    return GeneratorMatrix(g, m, RECURSIVE_RAW)


def _nested_rows(m: int, degree3: bool) -> np.ndarray:
    x = variable_rows(m)
    rows = [np.ones(1 << m, dtype=np.uint8), *x]
    rows += [x[m - 1] & x[i] for i in range(m - 1)]
    if degree3:
        rows += [x[m - 2] & x[i] for i in range(m - 2)]
        rows += [x[m - 1] & x[m - 2] & x[i] for i in range(m - 2)]
    return np.array(rows, dtype=np.uint8)


def generator_b2(m: int) -> GeneratorMatrix:
    if m < 2:
        raise ValueError("B_2 needs m >= 2")
    return GeneratorMatrix(_nested_rows(m, False), m, USER_NESTED)


def generator_b3(m: int) -> GeneratorMatrix:
    if m < 3:
        raise ValueError("B_3 needs m >= 3")
    return GeneratorMatrix(_nested_rows(m, True), m, USER_NESTED)


# --- encoding -----------------------------------------------------------------


def zero_tail(user_bits, W: int) -> np.ndarray:
    """Pad the ``w`` active users' bits (last axis) with zeros up to ``W``."""
    a = np.asarray(user_bits, dtype=np.uint8)
    w = a.shape[-1]
    if not 1 <= w <= W:
        raise ValueError(f"need 1 <= w <= W, got w={w}, W={W}")
    pad = [(0, 0)] * (a.ndim - 1) + [(0, W - w)]
    return np.pad(a, pad)


def encode_many(a, code: CodeLike) -> np.ndarray:
    """Encode messages along the last axis; returns uint8 codewords ``(..., K)``."""
    G = _as_generator(code)
    a = np.asarray(a)
    if a.shape[-1] != G.W:
        raise ValueError(f"message length {a.shape[-1]} does not match W={G.W}")
    if not np.all((a == 0) | (a == 1)):
        raise ValueError("message entries must be 0 or 1")
    return ((a.astype(np.int64) @ G.rows.astype(np.int64)) & 1).astype(np.uint8)


def encode(a: Sequence[int], code: CodeLike) -> Codeword:
    G = _as_generator(code)
    a = np.asarray(a)
    if a.ndim != 1:
        raise ValueError("encode takes a single message; use encode_many for batches")
    return Codeword(G.m, encode_many(a, G))


def message_bits(index, W: int) -> np.ndarray:
    """Messages whose bit ``k`` is bit ``k`` of ``index`` (LSB-first)."""
    idx = np.asarray(index, dtype=np.int64)
    return ((idx[..., None] >> np.arange(W)) & 1).astype(np.uint8)


def codeword_table(code: CodeLike, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Codewords for message indices ``start <= i < stop`` as a ``(n, K)`` array."""
    G = _as_generator(code)
    if G.W > MAX_ENUM_DIMENSION:
        raise ValueError(f"dimension W={G.W} is too large to enumerate (limit {MAX_ENUM_DIMENSION})")
    stop = 1 << G.W if stop is None else min(stop, 1 << G.W)
    return encode_many(message_bits(np.arange(start, stop), G.W), G)


def enumerate_code(code: CodeLike, chunk: int = 4096) -> Iterator[Codeword]:
    """Yield every codeword once, in message-index order."""
    G = _as_generator(code)
    if G.W > MAX_ENUM_DIMENSION:
        raise ValueError(f"dimension W={G.W} is too large to enumerate (limit {MAX_ENUM_DIMENSION})")
    for lo in range(0, 1 << G.W, chunk):
        for bits in codeword_table(G, lo, lo + chunk):
            yield Codeword(G.m, bits)


# --- Golay complementary coset family ----------------------------------------


def _check_perm(m: int, perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of 0..{m - 1}")
    return perm


def golay_boolean(m: int, perm: Sequence[int], v: Sequence[int], e: int) -> BooleanFunction:
    """``sum_i x_{perm(i)} x_{perm(i+1)} + sum_i v_i x_i + e``."""
    perm = _check_perm(m, perm)
    v = np.asarray(v)
    if v.shape != (m,):
        raise ValueError(f"v must have {m} entries")
    terms = [(perm[i], perm[i + 1]) for i in range(m - 1)]
    terms += [(i,) for i in range(m) if v[i]]
    if e & 1:
        terms.append(())
    return BooleanFunction.from_terms(m, terms)


def golay_table(m: int) -> np.ndarray:
    """All distinct Golay codewords of length ``2**m`` as a ``(n, 2**m)`` array.

    Reversing a permutation yields the same quadratic form, and distinct
    quadratic forms span disjoint cosets of R(1, m), so deduplicating the
    quadratic parts deduplicates the codewords.
    """
    if not 2 <= m <= MAX_GOLAY_M:
        raise ValueError(f"Golay enumeration supports 2 <= m <= {MAX_GOLAY_M}")
    x = variable_rows(m)
    affine_part = encode_many(message_bits(np.arange(1 << (m + 1)), m + 1), generator_rm1(m))
    seen = set()
    blocks = []
    for perm in itertools.permutations(range(m)):
        q = np.zeros(1 << m, dtype=np.uint8)
        for i in range(m - 1):
            q ^= x[perm[i]] & x[perm[i + 1]]
        key = q.tobytes()
        if key in seen:
            continue
        seen.add(key)
        blocks.append(affine_part ^ q)
    return np.concatenate(blocks)


def enumerate_golay(m: int) -> Iterator[Codeword]:
    for bits in golay_table(m):
        yield Codeword(m, bits)


# --- modulation and decoding --------------------------------------------------


def bpsk(b) -> np.ndarray:
    """Map bits to ``(-1)**b`` as float64."""
    bits = b.bits if isinstance(b, Codeword) else np.asarray(b)
    return 1.0 - 2.0 * bits.astype(np.float64)


def fht_decode_rm1(rcv):
    """Maximum-likelihood soft decoding of R(1, m) by a fast Hadamard transform.

    ``rcv`` holds real soft values (``+1`` for bit 0) along its last axis.
    Returns ``(message, correlation)`` where the message is ordered like the
    rows of :func:`generator_rm1`, i.e. ``(e, v_0, ..., v_{m-1})``, and the
    correlation is the unit-normalized Walsh coefficient of the winner.  Ties
    go to the smallest Walsh index and then to the positive sign.
    """
    y = np.asarray(rcv, dtype=np.float64)
    n = y.shape[-1]
    if n < 2 or n & (n - 1):
        raise ValueError(f"received length must be a power of two >= 2, got {n}")
    m = n.bit_length() - 1
    spec = fwht(y)
    lstar = np.argmax(np.abs(spec), axis=-1)
    corr = np.take_along_axis(spec, lstar[..., None], axis=-1)[..., 0]
    e = (corr < 0).astype(np.uint8)
    msg = np.concatenate([e[..., None], message_bits(lstar, m)], axis=-1)
    corr = np.abs(corr)
    if msg.ndim == 1:
        return msg, float(corr)
    return msg, corr


def _coset_layout(code: CodeLike) -> tuple[GeneratorMatrix, np.ndarray]:
    G = _as_generator(code)
    m = G.m
    if G.W < m + 1 or not np.array_equal(G.rows[: m + 1], generator_rm1(m).rows):
        raise ValueError("coset decoding needs a generator whose first m+1 rows span R(1, m) in order")
    n_coset = G.W - (m + 1)
    if n_coset > 16:
        raise ValueError("too many coset representatives to enumerate")
    sel = message_bits(np.arange(1 << n_coset), n_coset).astype(np.int64)
    reps = ((sel @ G.rows[m + 1 :].astype(np.int64)) & 1).astype(np.uint8)
    return G, reps


def coset_soft_decode(rcv, code: CodeLike, block_bytes: int = 1 << 25) -> np.ndarray:
    """Soft-decision decoding of a union of R(1, m) cosets.

    Each coset representative (spanned by the generator rows after the first
    ``m + 1``) is stripped from the received vector and the remainder decoded
    with the fast Hadamard transform; the largest correlation wins, ties going
    to the smaller coset index.  Works on batches along leading axes.
    """
    G, reps = _coset_layout(code)
    signs = bpsk(reps)
    m = G.m
    y = np.asarray(rcv, dtype=np.float64)
    if y.shape[-1] != G.K:
        raise ValueError(f"received length {y.shape[-1]} does not match K={G.K}")
    lead = y.shape[:-1]
    flat = y.reshape(-1, G.K)
    n_c = signs.shape[0]
    out = np.empty((flat.shape[0], G.W), dtype=np.uint8)
    step = max(1, block_bytes // (8 * n_c * G.K))
    for lo in range(0, flat.shape[0], step):
        part = flat[lo : lo + step]
        spec = fwht(part[:, None, :] * signs[None, :, :])
        mag = np.abs(spec).reshape(part.shape[0], -1)
        best = np.argmax(mag, axis=1)
        c_idx, l_idx = np.divmod(best, G.K)
        val = spec[np.arange(part.shape[0]), c_idx, l_idx]
        out[lo : lo + step, 0] = val < 0
        out[lo : lo + step, 1 : m + 1] = message_bits(l_idx, m)
        out[lo : lo + step, m + 1 :] = message_bits(c_idx, G.W - m - 1)
    return out.reshape(*lead, G.W)
