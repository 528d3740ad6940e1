"""Counter-based uniform and Poisson draws keyed by integer tuples.

Used for per-sample fixture simulation: each (sample, fixture) pair gets its
own reproducible draw regardless of store iteration order, by hashing the
identifying integers through a 64-bit avalanche mix.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# rates are clamped here; far beyond anything a sane strength vector produces,
# and it bounds the inversion loop
MAX_RATE = 300.0


def _mix(h: np.ndarray) -> np.ndarray:
    h = h + _GAMMA
    h ^= h >> np.uint64(30)
    h *= _M1
    h ^= h >> np.uint64(27)
    h *= _M2
    h ^= h >> np.uint64(31)
    return h


def keyed_uniforms(*parts) -> np.ndarray:
    """Uniform(0,1) draws from hashed integer keys, broadcast over parts."""
    with np.errstate(over="ignore"):
        h = _mix(np.asarray(np.uint64(0x243F6A8885A308D3)))
        for p in parts:
            arr = np.asarray(p)
            if arr.dtype.kind not in "iu":
                raise ValueError("hash key parts must be integers")
            h = _mix(h ^ _mix(arr.astype(np.int64).view(np.uint64)))
    return (h >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def poisson_from_uniforms(rates: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Poisson draws by CDF inversion of precomputed uniforms.

    Vectorized over any shape; monotone in the uniform for a fixed rate.
    """
    lam = np.minimum(np.asarray(rates, dtype=float), MAX_RATE)
    u = np.asarray(uniforms, dtype=float)
    if lam.shape != u.shape:
        lam, u = np.broadcast_arrays(lam, u)
    if np.any(lam < 0.0) or not np.all(np.isfinite(lam)):
        raise ValueError("rates must be finite and nonnegative")
    shape = lam.shape
    lam = lam.ravel()
    u = u.ravel()
    out = np.zeros(lam.shape, dtype=np.int64)
    cdf = np.exp(-lam)
    # iterate only over unresolved entries so the work tracks the mean rate,
    # not the largest one
    idx = np.flatnonzero(u > cdf)
    lam_p, pmf_p, cdf_p, u_p = lam[idx], cdf[idx], cdf[idx], u[idx]
    k = 0
    cap = int(np.ceil(lam.max() + 12.0 * np.sqrt(lam.max() + 1.0) + 25.0)) if lam.size else 0
    while idx.size and k < cap:
        k += 1
        pmf_p = pmf_p * lam_p / k
        cdf_p = cdf_p + pmf_p
        out[idx] += 1
        done = u_p <= cdf_p
        if done.any():
            keep = ~done
            idx = idx[keep]
            lam_p, pmf_p, cdf_p, u_p = lam_p[keep], pmf_p[keep], cdf_p[keep], u_p[keep]
    return out.reshape(shape)
