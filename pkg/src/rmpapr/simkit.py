"""Experiments: Monte-Carlo CCDF, exhaustive PAPR certification, user sweeps, AWGN round trips.

Randomness is keyed by ``(seed, stream, chunk_index)`` through
``numpy.random.SeedSequence`` spawn keys.  Symbols are grouped into chunks of
fixed size, so results depend only on the seed and the symbol index, never on
how chunks are spread across worker processes.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .rmcodes import (
    MAX_GOLAY_M,
    USER_NESTED,
    CodeSpec,
    bpsk,
    codeword_table,
    coset_soft_decode,
    golay_table,
    message_bits,
)
from .waveform import (
    SystemConfig,
    chips_for,
    modulate,
    papr_linear,
    receive_chips,
    spread,
    synthesize,
)

CHUNK = 2048
BOUND_TOL = 1e-9
MAX_CERTIFY_DIMENSION = 20

_STREAM_BITS = 0
_STREAM_NOISE = 1


def _rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, chunk))
    return np.random.Generator(np.random.Philox(ss))


def _chunks(n: int, size: int) -> list[tuple[int, int, int]]:
    return [(i, lo, min(lo + size, n)) for i, lo in enumerate(range(0, n, size))]


def _run(fn: Callable, tasks: Sequence[tuple], jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def _check_system(cfg: SystemConfig, code: CodeSpec) -> None:
    if code.family == "Golay":
        raise ValueError("the Golay family has no encoder; use certify_bound or golay_max_table")
    if code.m != cfg.m:
        raise ValueError(f"code length 2^{code.m} does not match spreading factor 2^{cfg.m}")
    if code.family != "uncoded" and cfg.W != code.W:
        raise ValueError(f"config W={cfg.W} does not match code dimension {code.W}")


# --- CCDF ---------------------------------------------------------------------


@dataclass
class CcdfCurve:
    """Empirical Pr(PAPR > threshold), stored as raw sorted dB samples."""

    samples_db: np.ndarray
    n_symbols: int
    seed: int
    max_linear: float = field(default=math.nan)

    def __post_init__(self):
        self.samples_db = np.sort(np.asarray(self.samples_db, dtype=np.float64))
        if self.samples_db.size != self.n_symbols:
            raise ValueError("sample count does not match n_symbols")

    @property
    def thresholds_db(self) -> np.ndarray:
        return self.samples_db

    @property
    def prob(self) -> np.ndarray:
        n = self.n_symbols
        above = n - np.searchsorted(self.samples_db, self.samples_db, side="right")
        return above / n

    def exceedance(self, threshold_db) -> np.ndarray:
        t = np.asarray(threshold_db, dtype=np.float64)
        return (self.n_symbols - np.searchsorted(self.samples_db, t, side="right")) / self.n_symbols

    @classmethod
    def merge(cls, curves: Iterable["CcdfCurve"], seed: int) -> "CcdfCurve":
        curves = list(curves)
        samples = np.concatenate([c.samples_db for c in curves])
        return cls(samples, samples.size, seed, max(c.max_linear for c in curves))

    def to_csv(self, bin_db: float = 0.01) -> str:
        """CSV text with one row per occupied ``bin_db`` threshold bin."""
        grid = np.unique(np.round(self.samples_db / bin_db).astype(np.int64))
        thresholds = grid * bin_db
        probs = self.exceedance(thresholds)
        buf = io.StringIO()
        buf.write("lambda_db,ccdf\n")
        for t, p in zip(thresholds, probs):
            buf.write(f"{t:.4f},{p:.8g}\n")
        return buf.getvalue()


def _ccdf_chunk(cfg: SystemConfig, code: CodeSpec, seed: int, chunk: int, lo: int, hi: int) -> np.ndarray:
    rng = _rng(seed, _STREAM_BITS, chunk)
    bits = rng.integers(0, 2, size=(hi - lo, cfg.N, cfg.w), dtype=np.uint8)
    frames = modulate(chips_for(bits, code), cfg)
    return papr_linear(frames, cfg.w, cfg.N, cfg.oversample)


def papr_samples(cfg: SystemConfig, code: CodeSpec, n_symbols: int, seed: int, jobs: int = 1) -> np.ndarray:
    """Linear PAPR of ``n_symbols`` random symbols, in symbol-index order."""
    _check_system(cfg, code)
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    tasks = [(cfg, code, seed, c, lo, hi) for c, lo, hi in _chunks(n_symbols, CHUNK)]
    return np.concatenate(_run(_ccdf_chunk, tasks, jobs))


def ccdf_estimate(cfg: SystemConfig, code: CodeSpec, n_symbols: int, seed: int, jobs: int = 1) -> CcdfCurve:
    lin = papr_samples(cfg, code, n_symbols, seed, jobs)
    return CcdfCurve(10 * np.log10(lin), n_symbols, seed, float(lin.max()))


def lambda_at(curve: CcdfCurve, p: float = 1e-3) -> float:
    """Smallest threshold (dB) whose empirical exceedance probability is at most ``p``.

    The exceedance staircase is linearly interpolated between adjacent sorted
    samples.  Needs at least ``1/p`` samples.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    x = curve.samples_db
    n = x.size
    if n < 1 / p:
        raise ValueError(f"{n} samples cannot resolve an exceedance probability of {p}")
    k = max(1, math.ceil(n * (1 - p) - 1e-9))
    if k == 1:
        return float(x[0])
    # exceedance is (n-k+1)/n at x[k-2] and (n-k)/n at x[k-1] (0-based storage)
    frac = min(1.0, max(0.0, (n - k + 1) - n * p))
    return float(x[k - 2] + (x[k - 1] - x[k - 2]) * frac)


# --- exhaustive certification ------------------------------------------------


@dataclass
class BoundReport:
    spec: CodeSpec
    config: SystemConfig
    grid_density: int
    observed_max_linear: float
    theoretical_bound_linear: float
    holds: bool
    worst_codeword: np.ndarray
    worst_message: np.ndarray | None
    n_codewords: int

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "config": self.config.to_dict(),
            "grid_density": self.grid_density,
            "observed_max_linear": self.observed_max_linear,
            "observed_max_db": 10 * math.log10(self.observed_max_linear),
            "theoretical_bound_linear": self.theoretical_bound_linear,
            "holds": self.holds,
            "worst_codeword": "".join(map(str, self.worst_codeword.tolist())),
            "worst_message": None if self.worst_message is None else "".join(map(str, self.worst_message.tolist())),
            "n_codewords": self.n_codewords,
        }


def _block_max(words: np.ndarray, cfg: SystemConfig, oversample: int) -> tuple[float, int]:
    frames = spread(bpsk(words), cfg)
    p = papr_linear(frames, cfg.w, 1, oversample)
    i = int(np.argmax(p))
    return float(p[i]), i


def certify_bound(
    spec: CodeSpec, cfg: SystemConfig | None = None, grid_oversample: int = 64, chunk: int = 2048
) -> BoundReport:
    """Maximum PAPR over every codeword of ``spec`` (N = 1) on a dense sampling grid."""
    if spec.family == "uncoded":
        raise ValueError("nothing to certify for the uncoded baseline")
    if cfg is None:
        W = int(spec.W) if spec.is_linear else 1 << spec.m
        cfg = SystemConfig(m=spec.m, N=1, w=W, W=W, oversample=grid_oversample)
    if cfg.N != 1:
        raise ValueError("certification is defined for N = 1")
    if cfg.m != spec.m:
        raise ValueError("config and code lengths differ")
    best, best_word, best_msg = -1.0, None, None
    if spec.is_linear:
        if spec.W > MAX_CERTIFY_DIMENSION:
            raise ValueError(f"2^{spec.W} codewords exceed the enumeration guard 2^{MAX_CERTIFY_DIMENSION}")
        G = spec.generator()
        total = 1 << G.W
        for lo in range(0, total, chunk):
            words = codeword_table(G, lo, lo + chunk)
            val, i = _block_max(words, cfg, grid_oversample)
            if val > best:
                best, best_word, best_msg = val, words[i], message_bits(lo + i, G.W)
    else:
        if spec.m > MAX_GOLAY_M:
            raise ValueError(f"Golay enumeration is limited to m <= {MAX_GOLAY_M}")
        table = golay_table(spec.m)
        total = table.shape[0]
        for lo in range(0, total, chunk):
            val, i = _block_max(table[lo : lo + chunk], cfg, grid_oversample)
            if val > best:
                best, best_word = val, table[lo + i]
    return BoundReport(
        spec=spec,
        config=cfg,
        grid_density=grid_oversample,
        observed_max_linear=best,
        theoretical_bound_linear=spec.papr_bound,
        holds=best <= spec.papr_bound + BOUND_TOL,
        worst_codeword=best_word,
        worst_message=best_msg,
        n_codewords=total,
    )


@dataclass
class GolayRow:
    m: int
    theoretical: float
    conjectured: float
    observed: float
    within_proven: bool
    within_conjecture: bool


def golay_max_table(m_range: Iterable[int], oversample: int = 64) -> list[GolayRow]:
    """Observed maximum PAPR of Golay-coded signals against the proven and conjectured bounds."""
    rows = []
    for m in m_range:
        rep = certify_bound(CodeSpec.golay(m), grid_oversample=oversample)
        theo = float(2 ** (m - m // 2))
        conj = float(2 ** ((m + 1) // 3))
        obs = rep.observed_max_linear
        rows.append(GolayRow(m, theo, conj, obs, obs <= theo + BOUND_TOL, obs <= conj + BOUND_TOL))
    return rows


# --- user-dependent bounds ------------------------------------------------------


def user_bound(code: CodeSpec, w: int, N: int) -> float:
    """Maximum PAPR for ``w`` active users under zero tailing (user-nested row order)."""
    m = code.m
    if code.row_order != USER_NESTED or code.r > 3:
        raise ValueError("user-dependent bounds need the user-nested row order of B_1, B_2 or B_3")
    if not 1 <= w <= code.W:
        raise ValueError(f"w={w} outside 1..{code.W}")
    if w <= m + 1:
        return float(N)
    if w <= 2 * m:
        return 2.0 * N
    return 4.0 * N


@dataclass
class SweepRow:
    w: int
    lambda0_db: float
    max_db: float
    bound_db: float
    violations: int


def user_sweep(
    cfg: SystemConfig,
    code: CodeSpec,
    w_range: Iterable[int],
    n_symbols: int,
    seed: int,
    p: float = 1e-3,
    jobs: int = 1,
) -> list[SweepRow]:
    """Per active-user count: the CCDF quantile and the count of user-bound violations."""
    if code.family not in ("RM1", "B_r", "RM_full_map") or code.row_order != USER_NESTED or code.r > 3:
        raise ValueError("user sweeps need B_1/B_2/B_3 with the user-nested row order")
    rows = []
    for w in w_range:
        c = cfg.replace(w=w)
        lin = papr_samples(c, code, n_symbols, seed, jobs)
        bound = user_bound(code, w, c.N)
        curve = CcdfCurve(10 * np.log10(lin), n_symbols, seed)
        lam = lambda_at(curve, p) if n_symbols >= 1 / p else math.nan
        rows.append(
            SweepRow(
                w=w,
                lambda0_db=lam,
                max_db=float(10 * np.log10(lin.max())),
                bound_db=10 * math.log10(bound),
                violations=int(np.count_nonzero(lin > bound + BOUND_TOL)),
            )
        )
    return rows


# --- AWGN round trip ------------------------------------------------------------


def _roundtrip_chunk(
    cfg: SystemConfig, code: CodeSpec, snr_db: float, seed: int, chunk: int, lo: int, hi: int
) -> int:
    n = hi - lo
    bits = _rng(seed, _STREAM_BITS, chunk).integers(0, 2, size=(n, cfg.N, cfg.w), dtype=np.uint8)
    chips = chips_for(bits, code)
    frames = modulate(chips, cfg)
    x = synthesize(frames, 1)
    if math.isfinite(snr_db):
        sigma2 = cfg.N * cfg.w / 10 ** (snr_db / 10)
        g = _rng(seed, _STREAM_NOISE, chunk).standard_normal((2,) + x.shape)
        x = x + math.sqrt(sigma2 / 2) * (g[0] + 1j * g[1])
    rx = np.fft.fft(x, axis=-1) / x.shape[-1]
    k = chips.shape[-1]
    soft = receive_chips(rx, cfg, k).real
    if code.family == "uncoded":
        decided = (soft < 0).astype(np.uint8)
    else:
        decided = coset_soft_decode(soft, code)[..., : cfg.w]
    return int(np.count_nonzero(decided != bits))


def awgn_roundtrip(
    cfg: SystemConfig, code: CodeSpec, snr_db: float, n_symbols: int, seed: int, jobs: int = 1
) -> float:
    """Information bit-error rate over a time-domain AWGN channel.

    ``snr_db`` is the mean signal power per critically sampled time sample over
    the complex noise variance; pass ``math.inf`` for a noiseless channel.
    Noise draws are shared across SNR values for the same seed.
    """
    _check_system(cfg, code)
    if code.family != "uncoded" and code.row_order != USER_NESTED:
        raise ValueError("coset decoding needs the user-nested row order")
    tasks = [(cfg, code, snr_db, seed, c, lo, hi) for c, lo, hi in _chunks(n_symbols, CHUNK)]
    errors = sum(_run(_roundtrip_chunk, tasks, jobs))
    return errors / (n_symbols * cfg.N * cfg.w)
