"""Money-metric welfare and robust ranges over compatible populations.

For a price change p0 -> p1 and budget b:
    EV = b (E(p0) / E(p1) - 1), CV = b (1 - E(p1) / E(p0)),
    AV = b (ln E(p0) - ln E(p1)),
so CV <= AV <= EV. AV is affine in ln E and is pinned down by the aggregate;
EV and CV are not, and their range over all populations with a given
aggregate is obtained by convexification / concavification.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .aggregate import gauss_legendre_panels
from .decompose import check_substitutes, mrs_distribution_from_substitutes
from .prefcore import (
    CobbDouglas,
    DimensionError,
    DomainError,
    Linear,
    Mixture,
    PiecewiseLinearE,
    Population,
    Preference,
    Translog,
    TwoGoodQ,
    expenditure_shares,
    log_expenditure,
)

KINDS = ("EV", "CV", "AV")


@dataclass(frozen=True)
class PriceChange:
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self) -> None:
        p0 = np.asarray(self.p0, dtype=float).reshape(-1)
        p1 = np.asarray(self.p1, dtype=float).reshape(-1)
        if p0.shape != p1.shape:
            raise DimensionError("p0 and p1 differ in length")
        if np.any(p0 <= 0) or np.any(p1 <= 0):
            raise ValueError("prices must be strictly positive")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)


@dataclass(frozen=True)
class WelfareRange:
    lower: float
    upper: float
    witnesses: tuple[Population, Population] | None = None

    def __post_init__(self) -> None:
        if self.lower > self.upper + 1e-12 * max(1.0, abs(self.upper)):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _from_log_ratio(kind: str, b: float, d: np.ndarray | float):
    """Welfare from d = ln E(p0) - ln E(p1)."""
    if kind == "EV":
        return b * np.expm1(d)
    if kind == "CV":
        return -b * np.expm1(-d)
    if kind == "AV":
        return b * d
    raise ValueError(f"unknown welfare measure {kind!r}")


def welfare_measure(kind: str, pref: Preference, b: float, change: PriceChange) -> float:
    """EV, CV or AV of one consumer with budget b."""
    d = log_expenditure(pref, change.p0) - log_expenditure(pref, change.p1)
    return float(_from_log_ratio(kind.upper(), b, d))


def population_welfare(pop: Population, kind: str, change: PriceChange) -> float:
    """Sum of individual welfare changes."""
    return float(sum(welfare_measure(kind, a.pref, a.budget, change) for a in pop.agents))


# --- parametric domains ----------------------------------------------------------

@dataclass(frozen=True)
class ParametricFamily:
    """One-parameter family theta -> preference on [lo, hi] with ln E affine in theta."""

    build: Callable[[float], Preference]
    lo: float
    hi: float
    name: str = "family"


def cobb_douglas_family() -> ParametricFamily:
    """Two-good Cobb-Douglas preferences indexed by the share of good 1."""
    return ParametricFamily(lambda t: CobbDouglas((t, 1.0 - t)), 0.0, 1.0, "cobb_douglas")


def check_affine(family: ParametricFamily, points: int = 7, seed: int = 0, tol: float = 1e-9) -> None:
    """Raise DomainError unless ln E is affine in the parameter at random prices."""
    rng = np.random.default_rng(seed)
    th = np.linspace(family.lo, family.hi, points)
    n = family.build(th[0]).n
    P = np.exp(rng.normal(size=(5, n)))
    L = np.array([log_expenditure(family.build(t), P) for t in th])  # points x 5
    coef = np.polyfit(th, L, 1)
    resid = L - (np.outer(th, coef[0]) + coef[1])
    if np.abs(resid).max() > tol * max(1.0, np.abs(L).max()):
        raise DomainError("log-expenditure is not affine in the family parameter")


def _hull_value(x: np.ndarray, y: np.ndarray, idx: np.ndarray, x0: float) -> tuple[float, int, int, float]:
    hx = x[idx]
    j = int(np.searchsorted(hx, x0, side="right")) - 1
    j = min(max(j, 0), len(idx) - 2) if len(idx) > 1 else 0
    if len(idx) == 1 or hx[j] == x0:
        return float(y[idx[j]]), int(idx[j]), int(idx[j]), 1.0
    a, b = int(idx[j]), int(idx[j + 1])
    lam = (x[b] - x0) / (x[b] - x[a])
    return float(lam * y[a] + (1 - lam) * y[b]), a, b, float(lam)


def hull_values(x: np.ndarray, y: np.ndarray, x0: float) -> tuple[tuple[float, int, int, float], tuple[float, int, int, float]]:
    """Lower convex and upper concave envelopes of (x, y) at x0 with their supports."""
    lo = _hull_value(x, y, kernels.lower_hull(x, y), x0)
    hi = _hull_value(x, y, kernels.upper_hull(x, y), x0)
    return lo, hi


def _param_grid(family: ParametricFamily, x0: float, grid: int) -> np.ndarray:
    g = np.linspace(family.lo, family.hi, grid)
    return np.unique(np.concatenate([g, [x0, family.lo, family.hi]]))


def robust_range_parametric(family: ParametricFamily, w: Callable[[Preference], float], aggregate_param: float,
                            B: float, grid: int = 10_001, check: bool = True) -> WelfareRange:
    """Range of sum_k b_k w(pref_k) over populations in the family with the given aggregate.

    ``w`` is the per-unit-budget welfare of one preference. The bounds are
    B * vex[w] and B * cav[w] at the aggregate parameter; witnesses are the
    two-agent populations supporting each envelope.
    """
    if not family.lo <= aggregate_param <= family.hi:
        raise ValueError("aggregate parameter outside the family")
    if check:
        check_affine(family)
    th = _param_grid(family, aggregate_param, grid)
    vals = np.array([w(family.build(t)) for t in th])
    (lv, la, lb, ll), (uv, ua, ub, ul) = hull_values(th, vals, aggregate_param)

    def witness(a: int, b: int, lam: float) -> Population:
        if a == b or lam >= 1.0:
            return Population.of([(family.build(th[a]), B)])
        if lam <= 0.0:
            return Population.of([(family.build(th[b]), B)])
        return Population.of([(family.build(th[a]), lam * B), (family.build(th[b]), (1 - lam) * B)])

    return WelfareRange(B * lv, B * uv, (witness(la, lb, ll), witness(ua, ub, ul)))


def hull_table(family: ParametricFamily, w: Callable[[Preference], float], grid: int = 1001) -> np.ndarray:
    """Columns (param, w, vex[w], cav[w]) on a uniform parameter grid, for plotting."""
    th = np.linspace(family.lo, family.hi, grid)
    vals = np.array([w(family.build(t)) for t in th])
    lo = kernels.lower_hull(th, vals)
    hi = kernels.upper_hull(th, vals)
    return np.column_stack([th, vals, np.interp(th, th[lo], vals[lo]), np.interp(th, th[hi], vals[hi])])


def welfare_functional(kind: str, change: PriceChange) -> Callable[[Preference], float]:
    """Per-unit-budget welfare of a preference, for use with the range functions."""
    return lambda pref: welfare_measure(kind, pref, 1.0, change)


# --- two-good substitutes ----------------------------------------------------------

def _share_breaks(pref: Preference) -> list[float]:
    """Price ratios t where s1(t, 1) may jump or kink."""
    leaves = pref.leaves() if isinstance(pref, Mixture) else [(1.0, pref)]
    out: list[float] = []
    for _, leaf in leaves:
        if isinstance(leaf, Linear) and leaf.v[0] > 0 and leaf.v[1] > 0:
            out.append(leaf.v[0] / leaf.v[1])
        elif isinstance(leaf, TwoGoodQ):
            out.extend(leaf.breaks)
        elif isinstance(leaf, Translog):
            out.extend(math.exp(b) for b in leaf.breaks)
        elif isinstance(leaf, PiecewiseLinearE):
            C = np.asarray(leaf.C)
            for i in range(len(C)):
                for j in range(i + 1, len(C)):
                    d1 = C[i, 0] - C[j, 0]
                    if d1 != 0:
                        z = (C[j, 1] - C[i, 1]) / d1
                        if z > 0:
                            out.append(float(z))
    return out


def _ev_linear(t: np.ndarray, change: PriceChange) -> np.ndarray:
    """Per-unit EV of the linear consumer with MRS t (t = 0 and inf allowed)."""
    z0 = change.p0[0] / change.p0[1]
    z1 = change.p1[0] / change.p1[1]
    c = change.p0[1] / change.p1[1]
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore"):
        r = np.where(np.isinf(t), z0 / z1, np.where(t == 0, 1.0, np.minimum(z0, t) / np.minimum(z1, t)))
    return c * r - 1.0


def robust_range_substitutes_ev(aggregate: Preference, B: float, change: PriceChange,
                                quad_nodes: int = 64) -> WelfareRange:
    """EV range over all populations of two-good consumers with this aggregate.

    The lower bound is the aggregate consumer's EV. The upper bound is
    attained by the unique decomposition into linear consumers,
    B * int EV_linear(t) dmu(t), evaluated by parts against F = 1 - s1(t, 1):
    int g dmu = g(inf) - int g'(t) F(t) dt over [min(z0, z1), max(z0, z1)].
    """
    if aggregate.n != 2:
        raise DimensionError("two-good range")
    check_substitutes(aggregate)
    lower = welfare_measure("EV", aggregate, B, change)
    z0 = change.p0[0] / change.p0[1]
    z1 = change.p1[0] / change.p1[1]
    c = change.p0[1] / change.p1[1]
    g_inf = float(_ev_linear(np.array([np.inf]), change)[0])
    leaves = aggregate.leaves() if isinstance(aggregate, Mixture) else [(1.0, aggregate)]
    if all(isinstance(l, Linear) for _, l in leaves):
        mu = mrs_distribution_from_substitutes(aggregate)
        upper = mu.mass_zero * float(_ev_linear(np.array([0.0]), change)[0]) + mu.mass_inf * g_inf
        upper += float(mu.w @ _ev_linear(mu.t, change))
        return WelfareRange(lower, max(B * upper, lower))
    zmin, zmax = min(z0, z1), max(z0, z1)
    integral = 0.0
    if zmax > zmin:
        cuts = sorted({math.log(zmin), math.log(zmax)} | {math.log(t) for t in _share_breaks(aggregate) if zmin < t < zmax})
        ys, ws = [], []
        for a, b in zip(cuts[:-1], cuts[1:]):
            panels = max(1, int(math.ceil((b - a) / 0.25)))
            y, wy = gauss_legendre_panels(a, b, panels, quad_nodes // 2 if quad_nodes > 16 else quad_nodes)
            ys.append(y)
            ws.append(wy)
        y = np.concatenate(ys)
        wy = np.concatenate(ws)
        t = np.exp(y)
        F = 1.0 - expenditure_shares(aggregate, np.column_stack([t, np.ones_like(t)]))[:, 0]
        # g(t) = c z0 / t on (z0, z1) when z0 < z1, and c t / z1 on (z1, z0) otherwise
        gp = -c * z0 / t**2 if z0 < z1 else np.full_like(t, c / z1)
        integral = float(np.sum(wy * t * gp * F))
    upper = B * (g_inf - integral)
    return WelfareRange(lower, max(upper, lower))


def small_change_range(aggregate: Preference, B: float, p0, dp, family: ParametricFamily | None = None,
                       param: float | None = None, grid: int = 10_001) -> float:
    """Second-order width of the welfare range for a small price change.

    The width is (B / 2) times the largest variance of <dp, D(p0, 1)> over
    populations compatible with the aggregate. For two-good substitutes this
    is s1 s2 (dp1/p1 - dp2/p2)^2 with s = s(p0); for an affine parametric
    family it is cav[f^2] - f^2 at the aggregate parameter, f = <dp/p, s>.
    """
    p0 = np.asarray(p0, dtype=float)
    dp = np.asarray(dp, dtype=float)
    rel = dp / p0
    if np.abs(rel).max() > 0.1:
        warnings.warn("price change above 10% of p0; the second-order range may be inaccurate", UserWarning)
    if family is None:
        if aggregate.n != 2:
            raise DomainError("substitutes domain is two-good")
        check_substitutes(aggregate)
        s = expenditure_shares(aggregate, p0)
        return 0.5 * B * float(s[0] * s[1]) * float(rel[0] - rel[1]) ** 2
    if param is None:
        raise ValueError("parametric domain needs the aggregate parameter")
    th = _param_grid(family, param, grid)
    f = np.array([float(expenditure_shares(family.build(t), p0) @ rel) for t in th])
    _, (cav, *_rest) = hull_values(th, f * f, param)
    f0 = float(expenditure_shares(family.build(param), p0) @ rel)
    return 0.5 * B * max(cav - f0 * f0, 0.0)


__all__ = [
    "KINDS", "ParametricFamily", "PriceChange", "WelfareRange", "check_affine", "cobb_douglas_family",
    "hull_table", "hull_values", "population_welfare", "robust_range_parametric", "robust_range_substitutes_ev",
    "small_change_range", "welfare_functional", "welfare_measure",
]
