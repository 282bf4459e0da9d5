"""MC-CDMA transmitter chain: spreading, block interleaving, synthesis and PAPR.

Spectra are complex arrays whose last axis holds the ``N * L`` subcarrier
coefficients of one OFDM symbol; any leading axes are batch axes.  The
symbol duration is normalized to one, so time enters only through the
sampling grid ``q / (oversample * N * L)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .boolfn import variable_rows
from .rmcodes import CodeLike, CodeSpec, bpsk, encode_many, zero_tail
from .transform import check_unit_circle, fwht, hadamard_matrix

SPREADINGS = ("walsh_hadamard", "golay_matrix", "identity")


@dataclass(frozen=True)
class SystemConfig:
    """One MC-CDMA setup: ``L = K = 2**m`` chips, ``N`` bits per user per symbol."""

    m: int
    N: int
    w: int
    W: int
    oversample: int = 8
    spreading: str = "walsh_hadamard"

    def __post_init__(self):
        if self.m < 0 or self.m > 16:
            raise ValueError(f"m must lie in [0, 16], got {self.m}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 1 <= self.w <= self.W <= self.L:
            raise ValueError(f"need 1 <= w <= W <= L, got w={self.w}, W={self.W}, L={self.L}")
        if self.oversample < 1:
            raise ValueError(f"oversample must be >= 1, got {self.oversample}")
        if self.spreading not in SPREADINGS:
            raise ValueError(f"unknown spreading {self.spreading!r}")

    @property
    def L(self) -> int:
        return 1 << self.m

    @property
    def K(self) -> int:
        return 1 << self.m

    @property
    def n_subcarriers(self) -> int:
        return self.N * self.L

    def replace(self, **changes) -> "SystemConfig":
        return SystemConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PaprResult:
    linear: float
    db: float
    peak_index: int


def golay_sign_pattern(m: int) -> np.ndarray:
    """``(-1)**(x_0 x_1 + x_1 x_2 + ... + x_{m-2} x_{m-1})`` over the ``2**m`` points."""
    x = variable_rows(m)
    q = np.zeros(1 << m, dtype=np.uint8)
    for i in range(m - 1):
        q ^= x[i] & x[i + 1]
    return 1.0 - 2.0 * q


def spreading_matrix(m: int, kind: str = "walsh_hadamard") -> np.ndarray:
    """Orthogonal ``L x L`` spreading matrix whose rows are the spreading sequences.

    ``golay_matrix`` multiplies every column ``k`` of the Walsh-Hadamard matrix
    by the quadratic path sign at ``k``; each row is then a (normalized)
    Golay complementary sequence and rows stay mutually orthogonal.
    """
    if kind == "walsh_hadamard":
        return hadamard_matrix(m)
    if kind == "golay_matrix":
        return hadamard_matrix(m) * golay_sign_pattern(m)[None, :]
    if kind == "identity":
        return np.eye(1 << m)
    raise ValueError(f"unknown spreading {kind!r}")


def _chips(d, cfg: SystemConfig) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    k = d.shape[-1]
    if not 1 <= k <= cfg.L:
        raise ValueError(f"chip vector length {k} must lie in [1, L={cfg.L}]")
    return d


def spread(d, cfg: SystemConfig) -> np.ndarray:
    """``sqrt(w/K) * d @ C`` where ``K = len(d)`` rows of the spreading matrix are used.

    Coded systems pass ``K = L`` chips; the uncoded baseline passes one chip
    per active user.
    """
    d = _chips(d, cfg)
    k = d.shape[-1]
    scale = math.sqrt(cfg.w / k)
    if cfg.spreading == "walsh_hadamard" and k == cfg.L:
        return scale * fwht(d)
    C = spreading_matrix(cfg.m, cfg.spreading)[:k]
    return scale * (d @ C)


def despread(u, cfg: SystemConfig, K: int | None = None) -> np.ndarray:
    """Correlate with the first ``K`` spreading sequences (``u @ C.T``)."""
    u = np.asarray(u)
    if u.shape[-1] != cfg.L:
        raise ValueError(f"spread block length {u.shape[-1]} does not match L={cfg.L}")
    k = cfg.L if K is None else K
    if cfg.spreading == "walsh_hadamard" and k == cfg.L:
        return fwht(u)
    C = spreading_matrix(cfg.m, cfg.spreading)[:k]
    return u @ C.T


def assemble_spectrum(blocks) -> np.ndarray:
    """Block-interleave ``(..., N, L)`` spread blocks so that ``s[N*l + n] = blocks[n][l]``."""
    b = np.asarray(blocks)
    if b.ndim < 2:
        raise ValueError("blocks must have shape (..., N, L)")
    n, l = b.shape[-2:]
    return np.swapaxes(b, -1, -2).reshape(*b.shape[:-2], n * l)


def deinterleave(frame, N: int) -> np.ndarray:
    s = np.asarray(frame)
    if s.shape[-1] % N:
        raise ValueError(f"frame length {s.shape[-1]} is not a multiple of N={N}")
    return np.swapaxes(s.reshape(*s.shape[:-1], s.shape[-1] // N, N), -1, -2)


def eval_S(frame, z: complex) -> complex:
    """Horner evaluation of ``sum_i s_i z**i`` on the unit circle."""
    z = check_unit_circle(z, tol=1e-9)
    acc = 0j
    for c in np.asarray(frame)[::-1]:
        acc = acc * z + c
    return complex(acc)


def synthesize(frame, oversample: int) -> np.ndarray:
    """Sample ``S(exp(2j*pi*q/n))`` for ``q < n = oversample * len(frame)``.

    A zero-padded inverse DFT scaled by ``n`` so samples are polynomial values.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    s = np.asarray(frame)
    n = oversample * s.shape[-1]
    return np.fft.ifft(s, n=n, axis=-1) * n


def papr_linear(frames, w: int, N: int, oversample: int) -> np.ndarray:
    """Batched PAPR (linear) against the analytic mean power ``N * w``."""
    if w < 1:
        raise ValueError("w must be >= 1")
    x = synthesize(frames, oversample)
    return np.max(x.real**2 + x.imag**2, axis=-1) / (N * w)


def papr(frame, w: int, N: int, oversample: int) -> PaprResult:
    if w < 1:
        raise ValueError("w must be >= 1")
    x = synthesize(frame, oversample)
    power = x.real**2 + x.imag**2
    q = int(np.argmax(power))
    linear = float(power[q] / (N * w))
    db = 10 * math.log10(linear) if linear > 0 else -math.inf
    return PaprResult(linear, db, q)


def to_db(linear) -> np.ndarray:
    return 10 * np.log10(linear)


def chips_for(user_bits, code: CodeSpec, generator=None) -> np.ndarray:
    """Map ``(..., N, w)`` user bits to BPSK chips ``(..., N, K)``.

    Coded systems zero-tail to ``W``, encode and load all ``K`` sequences; the
    uncoded baseline sends one chip per active user.
    """
    bits = np.asarray(user_bits, dtype=np.uint8)
    if code.family == "uncoded":
        return bpsk(bits)
    G = generator if generator is not None else code.generator()
    return bpsk(encode_many(zero_tail(bits, G.W), G))


def modulate(chips, cfg: SystemConfig) -> np.ndarray:
    """Spread and interleave ``(..., N, K)`` chips into ``(..., N*L)`` spectra."""
    c = np.asarray(chips)
    if c.ndim < 2 or c.shape[-2] != cfg.N:
        raise ValueError(f"chips must have shape (..., N={cfg.N}, K)")
    return assemble_spectrum(spread(c, cfg))


def transmit(user_bits, code: CodeLike, cfg: SystemConfig) -> np.ndarray:
    """Full transmitter: user bits ``(..., N, w)`` to subcarrier spectra ``(..., N*L)``."""
    if isinstance(code, CodeSpec):
        return modulate(chips_for(user_bits, code), cfg)
    return modulate(bpsk(encode_many(zero_tail(user_bits, code.W), code)), cfg)


def receive_chips(frames, cfg: SystemConfig, K: int | None = None) -> np.ndarray:
    """Invert :func:`modulate`: deinterleave, despread and remove ``sqrt(w/K)``."""
    k = cfg.L if K is None else K
    u = deinterleave(frames, cfg.N)
    return despread(u, cfg, k) / math.sqrt(cfg.w / k)
