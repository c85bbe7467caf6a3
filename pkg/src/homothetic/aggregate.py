"""Aggregation of populations into a single representative consumer.

The aggregate of agents with budgets b_k has ln E = sum_k (b_k / B) ln E_k.
Continuous populations are handled by quadrature over a parametric family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .prefcore import (
    CES,
    CobbDouglas,
    DimensionError,
    Leontief,
    Linear,
    Mixture,
    PiecewiseLinearE,
    Population,
    Preference,
    utility,
)

FAMILIES = ("linear_mrs", "leontief_ratio", "translog_log_mrs")


def _as_cobb_douglas(pref: Preference) -> np.ndarray | None:
    if isinstance(pref, CobbDouglas):
        return np.asarray(pref.a)
    if isinstance(pref, (Linear, Leontief)):
        v = np.asarray(pref.v)
        # single-minded on good i with unit value: E(p) = p_i exactly
        if np.count_nonzero(v) == 1 and v.max() == 1.0:
            return (v > 0).astype(float)
    return None


def aggregate_population(pop: Population) -> Preference:
    """Representative preference of a population.

    Returns a :class:`Mixture` with budget-share weights, simplified to a
    single Cobb-Douglas preference when every member has constant shares
    and ln E = <a, ln p> exactly.
    """
    betas = pop.betas
    cds = [_as_cobb_douglas(p) for p in pop.prefs]
    if all(a is not None for a in cds):
        a = np.sum([b * a for b, a in zip(betas, cds)], axis=0)
        return CobbDouglas(tuple(a))
    return Mixture(tuple(betas / betas.sum()), tuple(pop.prefs))


@dataclass(frozen=True)
class QuadratureMeasure:
    """Discrete probability measure over a one-parameter family.

    ``family`` names how a node maps to a preference:

    * ``linear_mrs``: node t > 0 is the linear preference v = (t, 1);
    * ``leontief_ratio``: node z > 0 is the Leontief preference v = (1, z);
    * ``translog_log_mrs``: node c is the linear preference (e^{c/2}, e^{-c/2}).
    """

    family: str
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if nodes.size == 0:
            raise ValueError("empty node list")
        if nodes.shape != w.shape or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be a probability vector matching the nodes")
        if self.family == "translog_log_mrs":
            bad = not np.all(np.isfinite(nodes))
        elif self.family == "linear_mrs":
            bad = bool(np.any(np.isnan(nodes)) or np.any(nodes < 0))
        else:
            bad = not np.all(np.isfinite(nodes)) or bool(np.any(nodes < 0))
        if bad:
            raise ValueError("nodes outside the family domain")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    def value_matrix(self) -> tuple[str, np.ndarray]:
        """Kernel kind and the per-node value matrix (log values for linear)."""
        t = self.nodes
        if self.family == "linear_mrs":
            # t = inf is the single-minded preference v = (1, 0)
            inf = np.isinf(t)
            with np.errstate(divide="ignore"):
                c0 = np.where(inf, 0.0, np.log(np.where(inf, 1.0, t)))
            return "linear", np.column_stack([c0, np.where(inf, -np.inf, 0.0)])
        if self.family == "translog_log_mrs":
            return "linear", np.column_stack([t / 2, -t / 2])
        return "leontief", np.column_stack([np.ones_like(t), t])

    def to_preference(self) -> Mixture:
        kind, M = self.value_matrix()
        if kind == "linear":
            comps = tuple(Linear(tuple(np.exp(r))) for r in M)
        else:
            comps = tuple(Leontief(tuple(r)) for r in M)
        return Mixture(tuple(self.weights / self.weights.sum()), comps)


def aggregate_continuous(measure: QuadratureMeasure, p) -> float | np.ndarray:
    """Quadrature value of int ln E_theta(p) dmu(theta)."""
    P = np.atleast_2d(np.asarray(p, dtype=float))
    if P.shape[1] != 2:
        raise DimensionError("parametric families are two-good")
    kind, M = measure.value_matrix()
    if kind == "linear":
        out = kernels.linear_logexp(np.log(P), M, measure.weights)
    else:
        out = kernels.leontief_logexp(P, M, measure.weights)
    return float(out[0]) if np.ndim(p) == 1 else out


def quantile_measure(ppf: Callable[[np.ndarray], np.ndarray], k: int, family: str = "linear_mrs") -> QuadratureMeasure:
    """k equal-weight nodes at the quantile midpoints (j + 1/2) / k."""
    u = (np.arange(k) + 0.5) / k
    return QuadratureMeasure(family, ppf(u), np.full(k, 1.0 / k))


def gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return nodes, weights


def uniform_log_mrs_measure(lo: float, hi: float, panels: int = 2000, order: int = 8) -> QuadratureMeasure:
    """Uniform distribution of ln(v1/v2) on [lo, hi] as a quadrature measure."""
    nodes, w = gauss_legendre_panels(lo, hi, panels, order)
    return QuadratureMeasure("translog_log_mrs", nodes, w / w.sum())


def density_measure(density) -> QuadratureMeasure:
    """Leontief-ratio measure from a :class:`~homothetic.decompose.RatioDensity`."""
    w = np.asarray(density.weights)
    return QuadratureMeasure("leontief_ratio", density.nodes, w / w.sum())


# --- geometric-mean contours -------------------------------------------------

@dataclass(frozen=True)
class ContourPoint:
    """Boundary point of {u >= level} along a ray; ``x`` is None if unbounded."""

    angles: tuple[float, ...]
    direction: np.ndarray
    x: np.ndarray | None


def _ray_directions(n: int, directions: int) -> list[tuple[tuple[float, ...], np.ndarray]]:
    th = np.arange(directions + 1) * (math.pi / 2) / directions
    if n == 2:
        dirs = [np.array([math.cos(t), math.sin(t)]) for t in th]
        return [((float(t),), np.where(np.abs(d) < 1e-15, 0.0, d)) for t, d in zip(th, dirs)]
    out = []
    for t in th:
        for ph in th:
            d = np.array([math.sin(ph) * math.cos(t), math.sin(ph) * math.sin(t), math.cos(ph)])
            out.append(((float(t), float(ph)), np.where(np.abs(d) < 1e-15, 0.0, d)))
    return out


def contour_sample(pref: Preference, level: float, directions: int = 64) -> list[ContourPoint]:
    """Points where rays from the origin cross the contour u(x) = level.

    By homogeneity the crossing on ray d is level * d / u(d); rays with
    u(d) = 0 never reach the contour.
    """
    if pref.n not in (2, 3):
        raise DimensionError("contours are sampled for n = 2 or 3")
    if directions < 8:
        raise ValueError("need at least 8 directions")
    if not level > 0:
        raise ValueError("level must be positive")
    pts = []
    for angles, d in _ray_directions(pref.n, directions):
        u = utility(pref, d)
        x = None if u <= 1e-300 else level * d / u
        pts.append(ContourPoint(angles, d, x))
    return pts


# --- Eisenberg-Gale primal ----------------------------------------------------

def _cvx_log_utility(pref: Preference, xk):
    import cvxpy as cp

    if isinstance(pref, Linear):
        return cp.log(np.asarray(pref.v) @ xk), []
    if isinstance(pref, Leontief):
        v = np.asarray(pref.v)
        pos = np.flatnonzero(v > 0)
        return cp.log(cp.min(cp.multiply(1.0 / v[pos], xk[pos]))), []
    if isinstance(pref, CobbDouglas):
        a = np.asarray(pref.a)
        pos = np.flatnonzero(a > 0)
        return a[pos] @ cp.log(xk[pos]) - float(np.sum(a[pos] * np.log(a[pos]))), []
    if isinstance(pref, CES):
        # u <= (sum (a_i x_i)^r)^(1/r) through exact-exponent power cones;
        # cp.pnorm rounds r to a rational, which is badly off for sigma near 1
        r = (pref.sigma - 1.0) / pref.sigma
        n = xk.shape[0]
        y = cp.multiply(np.asarray(pref.a), xk)
        u = cp.Variable(nonneg=True)
        t = cp.Variable(n, nonneg=True)
        uu = cp.hstack([u] * n)
        if r > 0:
            cons = [cp.constraints.PowCone3D(y, uu, t, r), cp.sum(t) >= u]
        else:
            cons = [cp.constraints.PowCone3D(t, y, uu, 1.0 / (1.0 - r)), cp.sum(t) <= u]
        return cp.log(u), cons
    if isinstance(pref, PiecewiseLinearE):
        M = np.asarray(pref.C)
        lam = cp.Variable(M.shape[0], nonneg=True)
        return cp.log(cp.sum(lam)), [M.T @ lam <= xk]
    raise TypeError(f"no convex utility model for {type(pref).__name__}")


@dataclass(frozen=True)
class EGResult:
    value: float
    allocation: np.ndarray
    status: str


def eisenberg_gale_primal(pop: Population, x, solver: str = "CLARABEL") -> EGResult:
    """Maximal weighted Nash welfare prod_k (u_k(x_k) / beta_k)^{beta_k}.

    Solved as a conic program over splits sum_k x_k = x. For matching dual
    families the value is the aggregate consumer's utility of x.
    """
    import cvxpy as cp

    x = np.asarray(x, dtype=float)
    if x.shape != (pop.n,) or np.any(x <= 0):
        raise ValueError("bundle must be strictly positive with n goods")
    beta = pop.betas
    if pop.m == 1:
        return EGResult(utility(pop.prefs[0], x), x[None, :].copy(), "closed_form")
    X = cp.Variable((pop.m, pop.n), nonneg=True)
    obj = 0
    cons = [cp.sum(X, axis=0) == x]
    for k, pref in enumerate(pop.prefs):
        # u_k is 1-homogeneous: model u_k(X_k / c_k) with c_k = u_k(x) so every
        # cone works at unit scale (CES with sigma near 1 reaches huge levels)
        c = utility(pref, x)
        lu, extra = _cvx_log_utility(pref, X[k] / c)
        obj = obj + beta[k] * (lu + math.log(c))
        cons += extra
    prob = cp.Problem(cp.Maximize(obj), cons)
    prob.solve(solver=solver)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"Eisenberg-Gale solve failed with status {prob.status}")
    val = math.exp(prob.value - float(np.sum(beta * np.log(beta))))
    return EGResult(val, np.maximum(X.value, 0.0), prob.status)


__all__ = [
    "ContourPoint", "EGResult", "QuadratureMeasure", "aggregate_continuous", "aggregate_population",
    "contour_sample", "density_measure", "eisenberg_gale_primal", "gauss_legendre_panels",
    "quantile_measure", "uniform_log_mrs_measure",
]
