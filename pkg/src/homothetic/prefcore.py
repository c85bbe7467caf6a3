"""Homothetic preferences represented by their log-expenditure functions.

Every preference exposes ``ln E(p)`` and the expenditure shares
``s_i(p) = d ln E / d ln p_i``; demand is ``b * s(p) / p``. Utility is
recovered by duality, ``u(x) = inf_p <p, x> / E(p)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from . import kernels

# Relative tolerance for declaring two candidate prices "tied" in demand().
DEMAND_TIE_TOL = 1e-12
SIGMA_ONE_BAND = 1e-9


class DimensionError(ValueError):
    """Goods dimensions of inputs do not match."""


class DomainError(ValueError):
    """A preference is outside the domain an operation requires."""


class ConvergenceWarning(UserWarning):
    """An inner numerical solve stopped before reaching its tolerance."""


def _vec(x, name: str) -> tuple[float, ...]:
    a = np.asarray(x, dtype=float).reshape(-1)
    if a.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return tuple(float(t) for t in a)


def _prices(p, n: int) -> tuple[np.ndarray, bool]:
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    if P.shape[-1] != n:
        raise DimensionError(f"price vector has {P.shape[-1]} goods, preference has {n}")
    if not np.all(P > 0):
        raise ValueError("prices must be strictly positive")
    return P, single


def _safe_log(v: np.ndarray) -> np.ndarray:
    out = np.full(v.shape, -np.inf)
    np.log(v, out=out, where=v > 0)
    return out


@dataclass(frozen=True)
class DemandResult:
    """Demand with a flag for price points where the optimal bundle is not unique.

    ``ties`` lists, for each tied component, its budget weight and the
    candidate per-unit-budget share vectors whose convex hull is the share set.
    """

    x: np.ndarray
    unique: bool
    ties: tuple[tuple[float, np.ndarray], ...] = ()


@dataclass(frozen=True, eq=False)
class Preference:
    """Base class. Subclasses implement vectorised ``_logexp`` and ``_shares``."""

    @property
    def n(self) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def _logexp(self, P: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def _shares(self, P: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def _candidates(self, p: np.ndarray, tol: float) -> np.ndarray:
        """Vertices of the share set at a single price vector, shape (c, n)."""
        return self._shares(p[None, :])

    def _utility(self, x: np.ndarray) -> float:
        return dual_utility_numeric(self, x)

    def to_dict(self) -> dict:  # pragma: no cover - overridden
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.to_dict() == other.to_dict()  # type: ignore[union-attr]

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))


@dataclass(frozen=True, eq=False)
class Linear(Preference):
    """u(x) = <v, x>; E(p) = min_i p_i / v_i."""

    v: tuple[float, ...]

    def __post_init__(self) -> None:
        v = _vec(self.v, "v")
        if min(v) < 0 or max(v) <= 0:
            raise ValueError("linear values must be nonnegative and not all zero")
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return len(self.v)

    @cached_property
    def logv(self) -> np.ndarray:
        return _safe_log(np.asarray(self.v))

    def _logexp(self, P):
        return kernels.linear_logexp(np.log(P), self.logv, [1.0])

    def _shares(self, P):
        return kernels.linear_shares(np.log(P), self.logv, [1.0])[0]

    def _candidates(self, p, tol):
        r = np.log(p) - self.logv
        tied = np.flatnonzero(r <= r.min() + tol * max(1.0, abs(r.min())))
        return np.eye(self.n)[tied[::-1]]

    def _utility(self, x):
        return float(np.dot(self.v, x))

    def to_dict(self):
        return {"kind": "linear", "v": list(self.v)}


@dataclass(frozen=True, eq=False)
class Leontief(Preference):
    """u(x) = min_i x_i / v_i; E(p) = <v, p>."""

    v: tuple[float, ...]

    def __post_init__(self) -> None:
        v = _vec(self.v, "v")
        if min(v) < 0 or max(v) <= 0:
            raise ValueError("Leontief values must be nonnegative and not all zero")
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return len(self.v)

    def _logexp(self, P):
        return np.log(P @ np.asarray(self.v))

    def _shares(self, P):
        w = P * np.asarray(self.v)
        return w / w.sum(axis=1, keepdims=True)

    def _utility(self, x):
        v = np.asarray(self.v)
        pos = v > 0
        return float(np.min(x[pos] / v[pos]))

    def to_dict(self):
        return {"kind": "leontief", "v": list(self.v)}


def _simplex(a, name: str, tol: float = 1e-9) -> tuple[float, ...]:
    t = _vec(a, name)
    if min(t) < 0 or abs(sum(t) - 1.0) > tol:
        raise ValueError(f"{name} must lie in the simplex")
    return t


@dataclass(frozen=True, eq=False)
class CobbDouglas(Preference):
    """E(p) = prod p_i^{a_i}; constant expenditure shares a."""

    a: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _simplex(self.a, "a"))

    @property
    def n(self) -> int:
        return len(self.a)

    def _logexp(self, P):
        return np.log(P) @ np.asarray(self.a)

    def _shares(self, P):
        return np.broadcast_to(np.asarray(self.a), P.shape).copy()

    def _utility(self, x):
        a = np.asarray(self.a)
        pos = a > 0
        if np.any(x[pos] <= 0):
            return 0.0
        return float(np.exp(np.sum(a[pos] * (np.log(x[pos]) - np.log(a[pos])))))

    def to_dict(self):
        return {"kind": "cobb_douglas", "a": list(self.a)}


@dataclass(frozen=True, eq=False)
class CES(Preference):
    """Constant elasticity of substitution.

    E(p) = (sum_i (p_i / a_i)^{1-sigma})^{1/(1-sigma)}, dual to
    u(x) = (sum_i (a_i x_i)^r)^{1/r} with r = (sigma - 1) / sigma.
    """

    a: tuple[float, ...]
    sigma: float

    def __post_init__(self) -> None:
        a = _simplex(self.a, "a")
        if min(a) <= 0:
            raise ValueError("CES weights must be strictly positive")
        s = float(self.sigma)
        if not (s > 0 and math.isfinite(s)) or abs(s - 1.0) <= SIGMA_ONE_BAND:
            raise ValueError("sigma must be positive and not equal to 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "sigma", s)

    @property
    def n(self) -> int:
        return len(self.a)

    def _z(self, P):
        return (1.0 - self.sigma) * (np.log(P) - np.log(np.asarray(self.a)))

    def _logexp(self, P):
        z = self._z(P)
        zm = z.max(axis=1)
        return (zm + np.log(np.exp(z - zm[:, None]).sum(axis=1))) / (1.0 - self.sigma)

    def _shares(self, P):
        z = self._z(P)
        e = np.exp(z - z.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)

    def _utility(self, x):
        r = (self.sigma - 1.0) / self.sigma
        ax = np.asarray(self.a) * x
        if r < 0 and np.any(ax <= 0):
            return 0.0
        return float(np.sum(ax**r) ** (1.0 / r))

    def to_dict(self):
        return {"kind": "ces", "a": list(self.a), "sigma": self.sigma}


@dataclass(frozen=True, eq=False)
class Translog(Preference):
    """Two-good translog preference, continued as an expenditure function.

    With z = ln(p1/p2): the middle branch is
    alpha ln p1 + (1-alpha) ln p2 - beta z^2 / 2 for
    -(1-alpha)/beta <= z <= alpha/beta; outside it the consumer buys a single
    good and ln E is ln p1 + (1-alpha)^2/(2 beta) or ln p2 + alpha^2/(2 beta),
    which keeps ln E continuous and its gradient continuous.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        a, b = float(self.alpha), float(self.beta)
        if not (0 < a < 1) or not (b > 0 and math.isfinite(b)):
            raise ValueError("translog needs alpha in (0,1) and beta > 0")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def n(self) -> int:
        return 2

    @property
    def breaks(self) -> tuple[float, float]:
        """Log price ratios where the consumer stops buying one of the goods."""
        return (-(1 - self.alpha) / self.beta, self.alpha / self.beta)

    def _logexp(self, P):
        a, b = self.alpha, self.beta
        l1, l2 = np.log(P[:, 0]), np.log(P[:, 1])
        z = l1 - l2
        lo, hi = self.breaks
        mid = a * l1 + (1 - a) * l2 - 0.5 * b * z * z
        return np.where(z < lo, l1 + (1 - a) ** 2 / (2 * b), np.where(z > hi, l2 + a * a / (2 * b), mid))

    def _shares(self, P):
        z = np.log(P[:, 0]) - np.log(P[:, 1])
        s1 = np.clip(self.alpha - self.beta * z, 0.0, 1.0)
        return np.column_stack([s1, 1.0 - s1])

    def to_dict(self):
        return {"kind": "translog", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class PiecewiseLinearE(Preference):
    """E(p) = min_{c in C} <c, p>, the expenditure of conv(C) + R^n_+."""

    C: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(_vec(c, "C row") for c in self.C)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("C must be a nonempty list of equal-length vectors")
        M = np.asarray(rows)
        if np.any(M < 0) or np.any(M.max(axis=1) <= 0):
            raise ValueError("C rows must be nonnegative and nonzero")
        object.__setattr__(self, "C", rows)

    @property
    def n(self) -> int:
        return len(self.C[0])

    @cached_property
    def _M(self) -> np.ndarray:
        return np.asarray(self.C)

    @cached_property
    def _lexrank(self) -> np.ndarray:
        order = np.lexsort(self._M.T[::-1])
        rank = np.empty(len(order), dtype=int)
        rank[order] = np.arange(len(order))
        return rank

    def _logexp(self, P):
        return np.log((P @ self._M.T).min(axis=1))

    def _pick(self, P, tol):
        L = np.log(P @ self._M.T)
        m = L.min(axis=1, keepdims=True)
        tied = L <= m + tol * np.maximum(1.0, np.abs(m))
        return tied

    def _shares(self, P):
        tied = self._pick(P, DEMAND_TIE_TOL)
        rank = np.where(tied, self._lexrank[None, :], np.iinfo(int).max)
        c = self._M[rank.argmin(axis=1)]
        w = P * c
        return w / w.sum(axis=1, keepdims=True)

    def _candidates(self, p, tol):
        tied = self._pick(p[None, :], tol)[0]
        idx = np.flatnonzero(tied)
        idx = idx[np.argsort(self._lexrank[idx])]
        w = p[None, :] * self._M[idx]
        return w / w.sum(axis=1, keepdims=True)

    def _utility(self, x):
        # max t with x >= sum_c lam_c c, t = sum lam
        r = len(self.C)
        res = linprog(-np.ones(r), A_ub=self._M.T, b_ub=x, bounds=[(0, None)] * r, method="highs")
        if res.status != 0:
            raise RuntimeError(f"utility LP failed: {res.message}")
        return float(-res.fun)

    def to_dict(self):
        return {"kind": "pwl", "C": [list(c) for c in self.C]}


@dataclass(frozen=True, eq=False)
class TwoGoodQ(Preference):
    """Two-good preference specified by a nondecreasing step function Q.

    Q equals ``values[0]`` on (0, breaks[0]), ``values[j]`` on
    [breaks[j-1], breaks[j]) and ``values[-1]`` beyond the last break. Shares
    are s1(z, 1) = z / (z + Q(z)) and ln E(z, 1) = int_1^z dw / (w + Q(w)).
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        br = tuple(float(t) for t in np.asarray(self.breaks, dtype=float).reshape(-1))
        vals = tuple(float(t) for t in np.asarray(self.values, dtype=float).reshape(-1))
        if len(vals) != len(br) + 1:
            raise ValueError("need exactly one more Q value than breakpoints")
        if any(not math.isfinite(b) or b <= 0 for b in br) or any(b1 >= b2 for b1, b2 in zip(br, br[1:])):
            raise ValueError("breakpoints must be positive, finite and strictly increasing")
        if any(math.isnan(q) or q < 0 for q in vals) or any(q1 > q2 for q1, q2 in zip(vals, vals[1:])):
            raise ValueError("Q must be nonnegative and nondecreasing")
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return 2

    @staticmethod
    def _seg(a, b, q):
        q = np.asarray(q, dtype=float)
        fin = np.isfinite(q)
        qq = np.where(fin, q, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log((b + qq) / (a + qq))
        return np.where(fin, val, 0.0)

    @cached_property
    def _table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        br = np.asarray(self.breaks)
        q = np.asarray(self.values)
        m = len(br)
        anchor = br[0] if m else 1.0
        lo = np.concatenate([[anchor], br])  # segment k starts at lo[k] (k=0 is anchored at br[0])
        cum = np.zeros(m + 1)
        for k in range(1, m):
            cum[k + 1] = cum[k] + float(self._seg(br[k - 1], br[k], q[k]))
        h1 = self._H(np.array([1.0]), br, q, lo, cum)[0]
        return br, q, np.stack([lo, cum]), h1

    @staticmethod
    def _H(z, br, q, lo, cum):
        k = np.searchsorted(br, z, side="right")
        return cum[k] + TwoGoodQ._seg(lo[k], z, q[k])

    def Q(self, z) -> np.ndarray:
        br, q, _, _ = self._table
        return q[np.searchsorted(br, np.asarray(z, dtype=float), side="right")]

    def _logexp(self, P):
        br, q, (lo, cum), h1 = self._table
        z = P[:, 0] / P[:, 1]
        return np.log(P[:, 1]) + self._H(z, br, q, lo, cum) - h1

    def _shares(self, P):
        z = P[:, 0] / P[:, 1]
        qz = self.Q(z)
        with np.errstate(invalid="ignore"):
            s1 = np.where(np.isfinite(qz), z / (z + np.where(np.isfinite(qz), qz, 0.0)), 0.0)
        return np.column_stack([s1, 1.0 - s1])

    def _candidates(self, p, tol):
        z = p[0] / p[1]
        br = np.asarray(self.breaks)
        near = np.flatnonzero(np.abs(br - z) <= tol * z)
        if near.size == 0:
            return self._shares(p[None, :])
        zs = np.array([br[near[0]] * (1 - 4 * tol), br[near[-1]] * (1 + 4 * tol)])
        s1 = self._shares(np.column_stack([zs, np.ones(2)]))[:, 0]
        # right-continuous value first: it buys less of good 1
        return np.array([[s1[1], 1 - s1[1]], [s1[0], 1 - s1[0]]])

    def to_dict(self):
        return {"kind": "two_good_q", "breaks": list(self.breaks), "values": list(self.values)}


@dataclass(frozen=True, eq=False)
class Mixture(Preference):
    """Aggregate with ln E = sum_k w_k ln E_k.

    Weights must sum to one. With ``signed=True`` negative weights are allowed;
    the caller is then responsible for ln E being a valid expenditure function.
    """

    weights: tuple[float, ...]
    components: tuple[Preference, ...]
    signed: bool = False

    def __post_init__(self) -> None:
        w = _vec(self.weights, "weights")
        comps = tuple(self.components)
        if len(w) != len(comps) or not comps:
            raise ValueError("need one weight per component")
        if len({c.n for c in comps}) != 1:
            raise DimensionError("mixture components must share n")
        if abs(sum(w) - 1.0) > 1e-12 * max(1.0, sum(abs(t) for t in w)):
            raise ValueError("mixture weights must sum to 1")
        if not self.signed and min(w) < 0:
            raise ValueError("mixture weights must be nonnegative (use signed=True)")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.components[0].n

    def leaves(self) -> list[tuple[float, Preference]]:
        out: list[tuple[float, Preference]] = []
        for w, c in zip(self.weights, self.components):
            if isinstance(c, Mixture):
                out.extend((w * w2, c2) for w2, c2 in c.leaves())
            else:
                out.append((w, c))
        return out

    @cached_property
    def _groups(self):
        lw, lv, tw, tv, other = [], [], [], [], []
        a = np.zeros(self.n)
        for w, c in self.leaves():
            if type(c) is Linear:
                lw.append(w)
                lv.append(c.logv)
            elif type(c) is Leontief:
                tw.append(w)
                tv.append(c.v)
            elif type(c) is CobbDouglas:
                a += w * np.asarray(c.a)
            else:
                other.append((w, c))
        lin = (np.asarray(lv), np.asarray(lw)) if lw else None
        leo = (np.asarray(tv), np.asarray(tw)) if tw else None
        return lin, leo, a, other

    def _logexp(self, P):
        lin, leo, a, other = self._groups
        out = np.log(P) @ a
        if lin is not None:
            out = out + kernels.linear_logexp(np.log(P), lin[0], lin[1])
        if leo is not None:
            out = out + kernels.leontief_logexp(P, leo[0], leo[1])
        for w, c in other:
            out = out + w * c._logexp(P)
        return out

    def _shares(self, P):
        lin, leo, a, other = self._groups
        s = np.broadcast_to(a, P.shape).copy()
        if lin is not None:
            s += kernels.linear_shares(np.log(P), lin[0], lin[1])[0]
        if leo is not None:
            s += kernels.leontief_shares(P, leo[0], leo[1])
        for w, c in other:
            s += w * c._shares(P)
        return s

    def to_dict(self):
        d = {
            "kind": "mixture",
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }
        if self.signed:
            d["signed"] = True
        return d


def share_packets(
    pref: Preference, p: np.ndarray, tol: float = DEMAND_TIE_TOL
) -> tuple[np.ndarray, list[tuple[float, np.ndarray]]]:
    """Split the share set at ``p`` into a fixed part and tied packets.

    Returns ``(fixed, packets)`` where every packet is ``(weight, candidates)``
    and the share set is fixed + sum_k weight_k * conv(candidates_k).
    """
    leaves = pref.leaves() if isinstance(pref, Mixture) else [(1.0, pref)]
    fixed = np.zeros(pref.n)
    packets: list[tuple[float, np.ndarray]] = []
    for w, leaf in leaves:
        cand = leaf._candidates(p, tol)
        if len(cand) == 1:
            fixed += w * cand[0]
        else:
            packets.append((w, cand))
    return fixed, packets


def log_expenditure(pref: Preference, p) -> float | np.ndarray:
    """ln E(p); accepts one price vector or a (k, n) batch."""
    P, single = _prices(p, pref.n)
    out = pref._logexp(P)
    return float(out[0]) if single else out


def expenditure_shares(pref: Preference, p, detail: bool = False):
    """Expenditure shares s(p) = d ln E / d ln p.

    At kinks the shares of the lexicographically smallest optimal bundle are
    returned; ``detail=True`` returns ``(shares, unique)`` for one price vector.
    """
    P, single = _prices(p, pref.n)
    if detail:
        if not single:
            raise ValueError("detail=True needs a single price vector")
        r = demand(pref, P[0], 1.0, detail=True)
        return r.x * P[0], r.unique
    S = pref._shares(P)
    return S[0] if single else S


def demand(pref: Preference, p, b: float = 1.0, detail: bool = False):
    """Marshallian demand b * grad ln E(p), renormalised so <p, x> = b."""
    if not b > 0:
        raise ValueError("budget must be positive")
    P, single = _prices(p, pref.n)
    if detail:
        if not single:
            raise ValueError("detail=True needs a single price vector")
        p1 = P[0]
        fixed, packets = share_packets(pref, p1)
        s = fixed.copy()
        for w, cand in packets:
            bundles = w * cand / p1
            order = np.lexsort(bundles.T[::-1])
            s += w * cand[order[0]]
        x = b * s / p1
        x *= b / float(p1 @ x)
        return DemandResult(x=x, unique=not packets, ties=tuple(packets))
    X = b * pref._shares(P) / P
    X *= (b / np.einsum("ij,ij->i", P, X))[:, None]
    return X[0] if single else X


# --- duality ---------------------------------------------------------------

_R_BOUND = 40.0


def _golden(f, a: float, b: float, tol: float = 1e-12, maxiter: int = 200) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _simplex_from_logratios(Q: np.ndarray) -> np.ndarray:
    """Map rows of (k, n-1) log-ratios to prices (with p_n = 1 before scaling)."""
    Z = np.concatenate([Q, np.zeros((Q.shape[0], 1))], axis=1)
    Z -= Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def dual_utility_numeric(pref: Preference, x: np.ndarray, tol: float = 1e-10) -> float:
    """u(x) = min over the open simplex of <p, x> / E(p), solved numerically."""
    n = pref.n
    if n == 1:
        return float(x[0] / math.exp(pref._logexp(np.ones((1, 1)))[0]))

    def F(P):
        with np.errstate(divide="ignore"):
            return np.log(P @ x) - pref._logexp(P)

    if n == 2:
        r = np.linspace(-_R_BOUND, _R_BOUND, 1601)
        P = np.column_stack([np.exp(r / 2), np.exp(-r / 2)])
        vals = F(P)
        i = int(np.argmin(vals))
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, len(r) - 1)]

        def f(t):
            return float(F(np.array([[math.exp(t / 2), math.exp(-t / 2)]]))[0])

        _, fmin = _golden(f, lo, hi, tol=tol)
        return math.exp(min(fmin, vals[i]))

    d = n - 1
    per = {2: 41, 3: 13}.get(d, 7)
    g1 = np.linspace(-10.0, 10.0, per)
    grid = np.stack(np.meshgrid(*([g1] * d), indexing="ij"), axis=-1).reshape(-1, d)
    vals = F(_simplex_from_logratios(grid))
    starts = grid[np.argsort(vals)[:4]]

    def f(q):
        q = np.clip(q, -_R_BOUND, _R_BOUND)
        return float(F(_simplex_from_logratios(q[None, :]))[0])

    best = float(vals.min())
    ok = False
    for q0 in starts:
        res = minimize(f, q0, method="Nelder-Mead",
                       options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 40000, "maxfev": 40000, "adaptive": True})
        res2 = minimize(f, res.x, method="Nelder-Mead",
                        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 40000, "maxfev": 40000, "adaptive": True})
        ok = ok or bool(res2.success)
        best = min(best, float(res.fun), float(res2.fun))
    if not ok:
        warnings.warn(f"dual utility search did not converge; best bound {math.exp(best)!r}", ConvergenceWarning)
    return math.exp(best)


def utility(pref: Preference, x) -> float:
    """Dual utility u(x) = inf_p <p, x> / E(p); 1-homogeneous, u(x) >= 0."""
    xa = np.asarray(x, dtype=float).reshape(-1)
    if xa.shape[0] != pref.n:
        raise DimensionError("bundle dimension does not match preference")
    if np.any(xa < 0) or not np.any(xa > 0):
        raise ValueError("bundle must be nonnegative and not identically zero")
    return pref._utility(xa)


# --- two-good Q characterisation -------------------------------------------

def preference_from_Q(breaks: Sequence[float], values: Sequence[float]) -> TwoGoodQ:
    """Build the two-good preference whose shares are s1(z, 1) = z / (z + Q(z))."""
    return TwoGoodQ(tuple(breaks), tuple(values))


# --- distance ----------------------------------------------------------------

def _distance_objective(a: Preference, b: Preference, P: np.ndarray) -> np.ndarray:
    one = np.ones((1, a.n))
    da = a._logexp(P) - a._logexp(one)[0]
    db = b._logexp(P) - b._logexp(one)[0]
    den = (1.0 + np.abs(np.log(P)).max(axis=1)) ** 2
    return np.abs(da - db) / den


def preference_distance(a: Preference, b: Preference, grid: int = 2000) -> float:
    """Sup over the open simplex of the normalised gap between log-expenditures."""
    if a.n != b.n:
        raise DimensionError("preferences must share n")
    if grid < 100:
        raise ValueError("grid must be at least 100")
    n = a.n
    if n == 1:
        return 0.0
    if n == 2:
        r = np.linspace(-30.0, 30.0, grid)

        def P_of(t):
            t = np.atleast_1d(t)
            return np.column_stack([-np.logaddexp(0, -t), -np.logaddexp(0, t)])

        vals = _distance_objective(a, b, np.exp(P_of(r)))
        i = int(np.argmax(vals))
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, grid - 1)]
        t, fneg = _golden(lambda t: -float(_distance_objective(a, b, np.exp(P_of(t)))[0]), lo, hi)
        return float(max(vals[i], -fneg))
    d = n - 1
    per = max(5, int(round(grid ** (1.0 / d))))
    g1 = np.linspace(-30.0, 30.0, per)
    Q = np.stack(np.meshgrid(*([g1] * d), indexing="ij"), axis=-1).reshape(-1, d)
    vals = _distance_objective(a, b, _simplex_from_logratios(Q))
    best = float(vals.max())
    for q0 in Q[np.argsort(-vals)[:3]]:
        res = minimize(lambda q: -float(_distance_objective(a, b, _simplex_from_logratios(np.clip(q, -60, 60)[None, :]))[0]),
                       q0, method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 20000})
        best = max(best, -float(res.fun))
    return best


# --- populations -------------------------------------------------------------

@dataclass(frozen=True)
class Agent:
    pref: Preference
    budget: float

    def __post_init__(self) -> None:
        b = float(self.budget)
        if not (b > 0 and math.isfinite(b)):
            raise ValueError("budgets must be positive and finite")
        object.__setattr__(self, "budget", b)


@dataclass(frozen=True)
class Population:
    """A finite list of agents; B is the total budget, betas the budget shares."""

    agents: tuple[Agent, ...]

    def __post_init__(self) -> None:
        ag = tuple(a if isinstance(a, Agent) else Agent(*a) for a in self.agents)
        if not ag:
            raise ValueError("population must be nonempty")
        if len({a.pref.n for a in ag}) != 1:
            raise DimensionError("all preferences in a population must share n")
        object.__setattr__(self, "agents", ag)

    @classmethod
    def of(cls, pairs: Iterable[tuple[Preference, float]]) -> "Population":
        return cls(tuple(Agent(p, b) for p, b in pairs))

    @property
    def n(self) -> int:
        return self.agents[0].pref.n

    @property
    def m(self) -> int:
        return len(self.agents)

    @property
    def budgets(self) -> np.ndarray:
        return np.array([a.budget for a in self.agents])

    @property
    def B(self) -> float:
        return float(self.budgets.sum())

    @property
    def betas(self) -> np.ndarray:
        b = self.budgets
        return b / b.sum()

    @property
    def prefs(self) -> list[Preference]:
        return [a.pref for a in self.agents]


__all__ = [
    "Agent", "CES", "CobbDouglas", "ConvergenceWarning", "DemandResult", "DimensionError", "DomainError",
    "Leontief", "Linear", "Mixture", "PiecewiseLinearE", "Population", "Preference", "Translog", "TwoGoodQ",
    "demand", "expenditure_shares", "log_expenditure", "preference_distance", "preference_from_Q",
    "share_packets", "utility",
]
