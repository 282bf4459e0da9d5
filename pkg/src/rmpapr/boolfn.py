"""Boolean functions in algebraic normal form and their associated codewords.

Both monomials and evaluation points are indexed LSB-first: index
``i = sum(i_l * 2**l)`` names the monomial ``prod(x_l for l with i_l = 1)``
and, for points, the assignment ``x_l = i_l``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_VARS = 16


def _frozen_bits(values, length: int, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != (length,):
        raise ValueError(f"{what} must have exactly {length} entries, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{what} entries must be 0 or 1")
    arr = arr.astype(np.uint8)
    arr.setflags(write=False)
    return arr


def _check_m(m: int) -> int:
    if not isinstance(m, (int, np.integer)) or not 0 <= m <= MAX_VARS:
        raise ValueError(f"variable count must be an integer in [0, {MAX_VARS}], got {m!r}")
    return int(m)


def mobius(bits: np.ndarray, m: int) -> np.ndarray:
    """Binary Moebius transform over the last axis (length ``2**m``).

    Maps an ANF coefficient table to its truth table and back; the transform
    is an involution over GF(2).
    """
    out = np.array(bits, dtype=np.uint8, copy=True)
    lead = out.shape[:-1]
    for l in range(m):
        h = 1 << l
        view = out.reshape(*lead, -1, 2, h)
        view[..., 1, :] ^= view[..., 0, :]
    return out


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A Boolean function of ``m`` variables given by its ANF coefficients."""

    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        m = _check_m(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "coeffs", _frozen_bits(self.coeffs, 1 << m, "coeffs"))

    @classmethod
    def zero(cls, m: int) -> "BooleanFunction":
        return cls(m, np.zeros(1 << _check_m(m), dtype=np.uint8))

    @classmethod
    def constant(cls, m: int, value: int = 1) -> "BooleanFunction":
        c = np.zeros(1 << _check_m(m), dtype=np.uint8)
        c[0] = value & 1
        return cls(m, c)

    @classmethod
    def from_terms(cls, m: int, terms: Iterable[Sequence[int]]) -> "BooleanFunction":
        """Build from monomials given as variable-index tuples; ``()`` is the constant 1.

        Repeated monomials cancel, as they would mod 2.
        """
        c = np.zeros(1 << _check_m(m), dtype=np.uint8)
        for term in terms:
            idx = 0
            for var in term:
                if not 0 <= var < m:
                    raise ValueError(f"variable x_{var} out of range for m={m}")
                idx |= 1 << var
            c[idx] ^= 1
        return cls(m, c)

    @classmethod
    def from_codeword(cls, word: "Codeword") -> "BooleanFunction":
        return cls(word.m, mobius(word.bits, word.m))

    def __add__(self, other: "BooleanFunction") -> "BooleanFunction":
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        if other.m != self.m:
            raise ValueError(f"cannot add functions of {self.m} and {other.m} variables")
        return BooleanFunction(self.m, self.coeffs ^ other.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.m, self.coeffs.tobytes()))

    def terms(self) -> list[tuple[int, ...]]:
        return [tuple(l for l in range(self.m) if i >> l & 1) for i in np.flatnonzero(self.coeffs)]

    def __repr__(self) -> str:
        if not self.coeffs.any():
            return f"BooleanFunction(m={self.m}, 0)"
        parts = ["1" if not t else "".join(f"x{v}" for v in reversed(t)) for t in self.terms()]
        return f"BooleanFunction(m={self.m}, {' + '.join(parts)})"


@dataclass(frozen=True, eq=False)
class Codeword:
    """Binary word of length ``2**m``, ``bits[j]`` being the value at point ``j``."""

    m: int
    bits: np.ndarray

    def __post_init__(self):
        m = _check_m(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "bits", _frozen_bits(self.bits, 1 << m, "bits"))

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    def __xor__(self, other: "Codeword") -> "Codeword":
        if not isinstance(other, Codeword):
            return NotImplemented
        if other.m != self.m:
            raise ValueError("codeword lengths differ")
        return Codeword(self.m, self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Codeword):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.m, self.bits.tobytes()))

    def __str__(self) -> str:
        return "".join(map(str, self.bits.tolist()))

    def __repr__(self) -> str:
        return f"Codeword(m={self.m}, {self})"


def eval_boolean(f: BooleanFunction, point: Sequence[int]) -> int:
    """Evaluate ``f`` at a 0/1 assignment of its ``m`` variables."""
    p = np.asarray(point)
    if p.shape != (f.m,):
        raise ValueError(f"point must have {f.m} entries, got shape {p.shape}")
    if not np.all((p == 0) | (p == 1)):
        raise ValueError("point entries must be 0 or 1")
    j = int(np.dot(p.astype(np.int64), 1 << np.arange(f.m, dtype=np.int64))) if f.m else 0
    idx = np.arange(1 << f.m)
    # monomial i is 1 at j exactly when its variable set is a subset of j's ones
    covered = (idx & ~j) == 0
    return int(f.coeffs[covered].sum() & 1)


def codeword_of(f: BooleanFunction) -> Codeword:
    return Codeword(f.m, mobius(f.coeffs, f.m))


def degree(f: BooleanFunction) -> int:
    """Algebraic degree; the zero function has degree 0."""
    nz = np.flatnonzero(f.coeffs)
    if nz.size == 0:
        return 0
    return int(max(bin(int(i)).count("1") for i in nz))


def compose_halves(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    """Return ``(1 + x_{m-1}) f + x_{m-1} g`` on one more variable than ``f`` and ``g``.

    The associated codeword is the concatenation of those of ``f`` and ``g``.
    """
    if f.m != g.m:
        raise ValueError(f"variable counts differ: {f.m} vs {g.m}")
    if f.m + 1 > MAX_VARS:
        raise ValueError("composition would exceed the variable limit")
    # b = f + x_{m-1} (f + g): upper half of the coefficient table is f ^ g
    return BooleanFunction(f.m + 1, np.concatenate([f.coeffs, f.coeffs ^ g.coeffs]))


def affine(m: int, v: Sequence[int], e: int) -> BooleanFunction:
    """The degree-at-most-one function ``sum(v_i x_i) + e``."""
    m = _check_m(m)
    v = np.asarray(v)
    if v.shape != (m,):
        raise ValueError(f"v must have {m} entries, got shape {v.shape}")
    c = np.zeros(1 << m, dtype=np.uint8)
    c[0] = int(e) & 1
    for i in range(m):
        c[1 << i] = int(v[i]) & 1
    return BooleanFunction(m, c)


def index_bits(j: int, m: int) -> np.ndarray:
    """LSB-first binary expansion of ``j`` over ``m`` positions."""
    return (j >> np.arange(m)) & 1


def variable_rows(m: int) -> np.ndarray:
    """``(m, 2**m)`` array whose row ``l`` is the truth table of ``x_l``."""
    j = np.arange(1 << m)
    return ((j[None, :] >> np.arange(m)[:, None]) & 1).astype(np.uint8)
