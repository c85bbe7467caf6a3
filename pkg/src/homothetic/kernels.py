"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``HOMOTHETIC_PURE_PYTHON=1`` to force the numpy implementations.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("HOMOTHETIC_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels


def _c2(a) -> np.ndarray:
    return np.ascontiguousarray(np.atleast_2d(a), dtype=float)


def _c1(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=float).reshape(-1)


def linear_logexp(logp, logv, w, gamma: float = 0.0, impl=None) -> np.ndarray:
    return (impl or _impl).linear_logexp(_c2(logp), _c2(logv), _c1(w), float(gamma))


def linear_shares(logp, logv, w, gamma: float = 0.0, impl=None) -> tuple[np.ndarray, np.ndarray]:
    return (impl or _impl).linear_shares(_c2(logp), _c2(logv), _c1(w), float(gamma))


def leontief_logexp(p, V, w, impl=None) -> np.ndarray:
    return (impl or _impl).leontief_logexp(_c2(p), _c2(V), _c1(w))


def leontief_shares(p, V, w, impl=None) -> np.ndarray:
    return (impl or _impl).leontief_shares(_c2(p), _c2(V), _c1(w))


def upper_hull(x, y, impl=None) -> np.ndarray:
    return (impl or _impl).upper_hull(_c1(x), _c1(y))


def lower_hull(x, y, impl=None) -> np.ndarray:
    return (impl or _impl).lower_hull(_c1(x), _c1(y))
