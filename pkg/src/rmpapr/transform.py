"""Unit-energy Walsh-Hadamard matrix and fast transform.

The normalized convention is used throughout: ``H_1 = [1]`` and each doubling
step carries a ``1/sqrt(2)`` factor, so every column has unit energy and
``H @ H == I``.
"""
from __future__ import annotations

import numpy as np

UNIT_CIRCLE_TOL = 1e-12


def _log2_length(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


def check_unit_circle(z: complex, tol: float = UNIT_CIRCLE_TOL) -> complex:
    """Return ``z`` as a complex number, refusing points off the unit circle."""
    z = complex(z)
    if abs(abs(z) - 1.0) > tol:
        raise ValueError(f"|z| = {abs(z)!r} is not on the unit circle (tol {tol})")
    return z


def hadamard_entry(m: int, k: int, l: int) -> float:
    n = 1 << m
    if not (0 <= k < n and 0 <= l < n):
        raise ValueError(f"indices ({k}, {l}) out of range for a {n}x{n} matrix")
    sign = -1.0 if bin(k & l).count("1") & 1 else 1.0
    return sign / np.sqrt(n)


def hadamard_matrix(m: int) -> np.ndarray:
    """Dense ``2**m x 2**m`` normalized Walsh-Hadamard matrix (Sylvester order)."""
    h = np.ones((1, 1))
    for _ in range(m):
        h = np.block([[h, h], [h, -h]]) / np.sqrt(2.0)
    return h


def fwht(v, axis: int = -1) -> np.ndarray:
    """Fast normalized Walsh-Hadamard transform along ``axis``.

    Returns ``v @ H`` for 1-D input; batched input is transformed row-wise.
    Output is float64 or complex128.
    """
    x = np.asarray(v)
    dtype = np.complex128 if np.iscomplexobj(x) else np.float64
    x = np.ascontiguousarray(np.moveaxis(np.asarray(x, dtype=dtype), axis, -1)).copy()
    n = x.shape[-1]
    m = _log2_length(n)
    lead = x.shape[:-1]
    scale = 1.0 / np.sqrt(2.0)
    for l in range(m):
        h = 1 << l
        view = x.reshape(*lead, -1, 2, h)
        a = view[..., 0, :].copy()
        b = view[..., 1, :]
        view[..., 0, :] = (a + b) * scale
        view[..., 1, :] = (a - b) * scale
    return np.moveaxis(x, -1, axis)


def tensor_profile(m: int, z: complex) -> np.ndarray:
    """``H_{2^m} @ (1, z, ..., z^{2^m - 1})`` via its product factorization.

    Entry ``i`` is ``prod_t phi_t**(1 - i_t) * theta_t**i_t`` with
    ``phi_t = (1 + z**(2**t))/sqrt(2)`` and ``theta_t = (1 - z**(2**t))/sqrt(2)``.
    """
    z = check_unit_circle(z)
    out = np.ones(1, dtype=np.complex128)
    zt = z
    for _ in range(m):
        phi = (1 + zt) / np.sqrt(2.0)
        theta = (1 - zt) / np.sqrt(2.0)
        out = np.concatenate([out * phi, out * theta])
        zt = zt * zt
    return out


def factor_pair(t: int, z: complex) -> tuple[complex, complex]:
    """The pair ``(phi_t, theta_t)`` at ``z``."""
    zt = complex(z) ** (1 << t)
    return (1 + zt) / np.sqrt(2.0), (1 - zt) / np.sqrt(2.0)
