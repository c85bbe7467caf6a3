"""Pure numpy implementations of the batched kernels.

These mirror ``_ckernels.pyx`` exactly and are used when the compiled
extension is unavailable or disabled.
"""

from __future__ import annotations

import numpy as np

# Two log-ratios closer than this count as a tie for hard-min kernels.
TIE_ATOL = 1e-12


def _hard_min(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise min over the last axis; picks the highest tied index."""
    m = a.min(axis=-1)
    tied = a <= (m + TIE_ATOL)[..., None]
    n = a.shape[-1]
    last = n - 1 - np.argmax(tied[..., ::-1], axis=-1)
    return m, last, tied.sum(axis=-1) > 1


# Upper bound on the size of a (k, m, n) temporary.
_CHUNK = 1 << 22


def _row_chunks(k: int, m: int, n: int):
    step = max(1, _CHUNK // max(1, m * n))
    for lo in range(0, k, step):
        yield slice(lo, min(k, lo + step))


def linear_logexp(logp: np.ndarray, logv: np.ndarray, w: np.ndarray, gamma: float) -> np.ndarray:
    """sum_j w_j * softmin_i (logp_i - logv_ji), hard min when gamma == 0.

    ``logp`` is (k, n), ``logv`` is (m, n) with -inf marking zero values.
    """
    out = np.empty(logp.shape[0])
    for sl in _row_chunks(logp.shape[0], *logv.shape):
        out[sl] = _linear_logexp(logp[sl], logv, w, gamma)
    return out


def _linear_logexp(logp, logv, w, gamma):
    a = logp[:, None, :] - logv[None, :, :]
    if gamma == 0.0:
        m = a.min(axis=-1)
    else:
        z = -a / gamma
        zmax = z.max(axis=-1)
        m = -gamma * (zmax + np.log(np.exp(z - zmax[..., None]).sum(axis=-1)))
    return m @ w


def linear_shares(
    logp: np.ndarray, logv: np.ndarray, w: np.ndarray, gamma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Weighted expenditure shares of a linear family and per-row tie flags."""
    s = np.empty(logp.shape)
    ties = np.empty(logp.shape[0], dtype=bool)
    for sl in _row_chunks(logp.shape[0], *logv.shape):
        s[sl], ties[sl] = _linear_shares(logp[sl], logv, w, gamma)
    return s, ties


def _linear_shares(logp, logv, w, gamma):
    a = logp[:, None, :] - logv[None, :, :]
    k, m, n = a.shape
    if gamma == 0.0:
        _, last, ties = _hard_min(a)
        s = np.zeros((k, n))
        for i in range(n):
            s[:, i] = (last == i).astype(float) @ w
        return s, ties.any(axis=1)
    z = -a / gamma
    z -= z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    e /= e.sum(axis=-1, keepdims=True)
    return np.einsum("kmn,m->kn", e, w), np.zeros(k, dtype=bool)


def leontief_logexp(p: np.ndarray, V: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.log(p @ V.T) @ w


def leontief_shares(p: np.ndarray, V: np.ndarray, w: np.ndarray) -> np.ndarray:
    return p * ((w[None, :] / (p @ V.T)) @ V)


def _chain(x: np.ndarray, y: np.ndarray, sign: float) -> np.ndarray:
    idx: list[int] = []
    for i in range(len(x)):
        while len(idx) >= 2:
            o, a = idx[-2], idx[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if sign * cross >= 0.0:
                idx.pop()
            else:
                break
        idx.append(i)
    return np.asarray(idx, dtype=np.int64)


def upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull of points sorted by x."""
    return _chain(np.asarray(x, float), np.asarray(y, float), 1.0)


def lower_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of points sorted by x."""
    return _chain(np.asarray(x, float), np.asarray(y, float), -1.0)
