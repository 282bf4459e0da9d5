"""scikit-learn style wrappers so the coded chain composes with pipelines.

``ReedMullerEncoder`` maps bit messages to codewords (``inverse_transform``
soft-decodes back), ``MCCDMAModulator`` maps per-symbol user bits to
subcarrier spectra and scores them by PAPR.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .rmcodes import CodeSpec, coset_soft_decode, encode_many, zero_tail
from .waveform import SystemConfig, chips_for, modulate, papr_linear, receive_chips, to_db


def check_bits(X, n_features: int | None = None, *, name: str = "X") -> np.ndarray:
    """Validate a 2-D array of 0/1 entries and return it as uint8."""
    X = check_array(X, dtype=None, ensure_2d=True, input_name=name)
    if not np.all((X == 0) | (X == 1)):
        raise ValueError(f"{name} must contain only 0/1 entries")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {n_features}")
    return X.astype(np.uint8)


class ReedMullerEncoder(TransformerMixin, BaseEstimator):
    """Encode rows of user bits with a Reed-Muller subcode.

    Parameters
    ----------
    code : str
        Short code name accepted by :meth:`CodeSpec.from_name` (``"rm1"``,
        ``"b2"``, ``"b3"``, ``"rmmap"``).
    m : int
        Codeword length exponent.
    zero_tail : bool
        Pad inputs narrower than ``W`` with zeros instead of rejecting them.
    """

    def __init__(self, code: str = "b3", m: int = 5, zero_tail: bool = True):
        self.code = code
        self.m = m
        self.zero_tail = zero_tail

    def fit(self, X=None, y=None):
        spec = CodeSpec.from_name(self.code, self.m)
        if not spec.is_linear:
            raise ValueError(f"{self.code!r} has no linear encoder")
        self.spec_ = spec
        self.generator_ = spec.generator()
        self.n_features_in_ = self.generator_.W
        return self

    def _messages(self, X) -> np.ndarray:
        X = check_bits(X)
        if X.shape[1] != self.n_features_in_:
            if not self.zero_tail or X.shape[1] > self.n_features_in_:
                raise ValueError(f"expected {self.n_features_in_} message bits, got {X.shape[1]}")
            X = zero_tail(X, self.n_features_in_)
        return X

    def transform(self, X):
        check_is_fitted(self, "generator_")
        return encode_many(self._messages(X), self.generator_)

    def inverse_transform(self, X):
        """Soft-decode rows of received values, ``+1`` standing for bit 0."""
        check_is_fitted(self, "generator_")
        X = check_array(X, dtype=np.float64)
        return coset_soft_decode(X, self.generator_)


class MCCDMAModulator(TransformerMixin, BaseEstimator):
    """Coded, Walsh-Hadamard spread MC-CDMA modulator.

    ``transform`` takes ``(n_symbols, N * w)`` user bits (bit ``n`` of user
    ``i`` at column ``n * w + i``) and returns ``(n_symbols, N * L)`` complex
    subcarrier spectra.  ``score_samples`` returns the PAPR in dB.
    """

    def __init__(self, code="b3", m=5, N=4, w=8, oversample=8, spreading="walsh_hadamard"):
        self.code = code
        self.m = m
        self.N = N
        self.w = w
        self.oversample = oversample
        self.spreading = spreading

    def fit(self, X=None, y=None):
        spec = CodeSpec.from_name(self.code, self.m)
        if spec.family == "Golay":
            raise ValueError("the Golay family has no encoder")
        W = int(spec.W)
        self.spec_ = spec
        self.config_ = SystemConfig(
            m=self.m, N=self.N, w=self.w, W=W, oversample=self.oversample, spreading=self.spreading
        )
        self.generator_ = spec.generator() if spec.is_linear else None
        self.n_features_in_ = self.N * self.w
        return self

    def _bits(self, X) -> np.ndarray:
        check_is_fitted(self, "config_")
        X = check_bits(X, self.n_features_in_)
        return X.reshape(-1, self.N, self.w)

    def transform(self, X):
        return modulate(chips_for(self._bits(X), self.spec_, self.generator_), self.config_)

    def score_samples(self, X):
        frames = self.transform(X)
        return to_db(papr_linear(frames, self.w, self.N, self.oversample))

    def inverse_transform(self, S):
        """Recover user bits from noiseless or noisy spectra."""
        check_is_fitted(self, "config_")
        S = np.asarray(S)
        k = self.w if self.spec_.family == "uncoded" else self.config_.L
        soft = receive_chips(S, self.config_, k).real
        if self.spec_.family == "uncoded":
            bits = (soft < 0).astype(np.uint8)
        else:
            bits = coset_soft_decode(soft, self.generator_)[..., : self.w]
        return bits.reshape(S.shape[0], -1)
