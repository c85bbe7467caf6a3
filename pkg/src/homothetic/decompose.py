"""Inverse aggregation and domain-membership checks.

Two-good substitutes decompose uniquely into linear consumers: the CDF of
the marginal rate of substitution v1/v2 is 1 - s1(t, 1). Two-good
preferences whose demand is a Stieltjes function decompose into Leontief
consumers. For n >= 3 only necessary conditions are checked.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable

import numpy as np

from .aggregate import QuadratureMeasure, gauss_legendre_panels
from .prefcore import (
    CES,
    CobbDouglas,
    ConvergenceWarning,
    DimensionError,
    DomainError,
    Linear,
    Mixture,
    Population,
    Preference,
    demand,
    expenditure_shares,
)

LOG_T_BOUND = 40.0
MONOTONE_TOL = 1e-12


# --- linear decompositions ----------------------------------------------------

@dataclass(frozen=True)
class MRSDistribution:
    """Distribution of MRS = v1/v2 over linear consumers.

    Atoms carry the interior mass; ``mass_zero`` sits on v = (0, 1) and
    ``mass_inf`` on v = (1, 0). ``cdf``/``ppf`` hold a closed form when known.
    """

    t: np.ndarray
    w: np.ndarray
    mass_zero: float = 0.0
    mass_inf: float = 0.0
    cdf_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)
    ppf_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float).reshape(-1)
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if t.shape != w.shape:
            raise ValueError("atoms and weights differ in length")
        if np.any(w < 0) or self.mass_zero < 0 or self.mass_inf < 0:
            raise ValueError("weights must be nonnegative")
        if np.any(t <= 0) or not np.all(np.isfinite(t)) or np.any(np.diff(t) < 0):
            raise ValueError("atoms must be positive, finite and sorted")
        if abs(w.sum() + self.mass_zero + self.mass_inf - 1.0) > 1e-12:
            raise ValueError("total mass must be 1")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "mass_zero", float(self.mass_zero))
        object.__setattr__(self, "mass_inf", float(self.mass_inf))

    def cdf(self, t) -> np.ndarray:
        """mu([0, t]) (closed form when available, else from the atoms)."""
        t = np.asarray(t, dtype=float)
        if self.cdf_fn is not None:
            return self.mass_zero + self.cdf_fn(t)
        cw = np.concatenate([[0.0], np.cumsum(self.w)])
        return self.mass_zero + cw[np.searchsorted(self.t, t, side="right")]

    def to_measure(self) -> QuadratureMeasure:
        nodes = np.concatenate([[0.0], self.t, [np.inf]])
        w = np.concatenate([[self.mass_zero], self.w, [self.mass_inf]])
        keep = w > 0
        return QuadratureMeasure("linear_mrs", nodes[keep], w[keep] / w[keep].sum())

    def to_population(self, budget: float = 1.0) -> Population:
        pairs: list[tuple[Preference, float]] = []
        if self.mass_zero > 0:
            pairs.append((Linear((0.0, 1.0)), budget * self.mass_zero))
        pairs += [(Linear((float(t), 1.0)), budget * float(w)) for t, w in zip(self.t, self.w) if w > 0]
        if self.mass_inf > 0:
            pairs.append((Linear((1.0, 0.0)), budget * self.mass_inf))
        return Population.of(pairs)

    def to_dict(self) -> dict:
        return {
            "atoms": [{"t": float(t), "w": float(w)} for t, w in zip(self.t, self.w)],
            "mass_zero": self.mass_zero,
            "mass_inf": self.mass_inf,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MRSDistribution":
        atoms = d.get("atoms", [])
        return cls(
            np.array([a["t"] for a in atoms], dtype=float),
            np.array([a["w"] for a in atoms], dtype=float),
            float(d.get("mass_zero", 0.0)),
            float(d.get("mass_inf", 0.0)),
        )


def _s1(pref: Preference, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return pref._shares(np.column_stack([t, np.ones_like(t)]))[:, 0]


def check_substitutes(pref: Preference, points: int = 4001) -> None:
    """Raise DomainError unless s1(t, 1) is nonincreasing on a log grid."""
    if pref.n != 2:
        raise DimensionError("two-good check")
    s = _s1(pref, np.exp(np.linspace(-LOG_T_BOUND, LOG_T_BOUND, points)))
    worst = float(np.max(np.diff(s))) if s.size > 1 else 0.0
    if worst > MONOTONE_TOL:
        raise DomainError(f"not substitutes: s1(t,1) increases by {worst:.3g} on the check grid")


def _merge(t: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(t, kind="stable")
    t, w = t[order], w[order]
    ut, inv = np.unique(t, return_inverse=True)
    uw = np.zeros(len(ut))
    np.add.at(uw, inv, w)
    return ut, uw


def _exact_linear(leaves: list[tuple[float, Linear]]) -> MRSDistribution:
    z0 = inf = 0.0
    ts, ws = [], []
    for w, lin in leaves:
        v1, v2 = lin.v
        if v1 == 0:
            z0 += w
        elif v2 == 0:
            inf += w
        else:
            ts.append(v1 / v2)
            ws.append(w)
    t, w = _merge(np.array(ts), np.array(ws))
    # absorb rounding so the total is exactly one
    if w.size:
        w[-1] += 1.0 - (w.sum() + z0 + inf)
    return MRSDistribution(t, w, z0, inf)


def _first_below(f: Callable[[np.ndarray], np.ndarray], levels: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """For each level L find z with f(z-) >= L > f(z) (f nonincreasing).

    Bisection in z, geometric while far apart, down to adjacent floats.
    Levels with f(lo) < L map to 0; levels with f(hi) >= L map to inf.
    """
    L = np.asarray(levels, dtype=float)
    out = np.empty(L.shape)
    flo, fhi = f(np.full(1, lo))[0], f(np.full(1, hi))[0]
    zero = flo < L
    inf = fhi >= L
    out[zero] = 0.0
    out[inf] = np.inf
    act = ~(zero | inf)
    a = np.full(L.shape, lo)
    b = np.full(L.shape, hi)
    for _ in range(400):
        idx = np.flatnonzero(act)
        if idx.size == 0:
            break
        aa, bb = a[idx], b[idx]
        mid = np.where(bb / aa > 1.0 + 1e-6, np.sqrt(aa) * np.sqrt(bb), aa + (bb - aa) / 2)
        done = (mid <= aa) | (mid >= bb)
        ge = f(mid) >= L[idx]
        a[idx] = np.where(~done & ge, mid, aa)
        b[idx] = np.where(~done & ~ge, mid, bb)
        act[idx[done]] = False
    out[~(zero | inf)] = b[~(zero | inf)]
    return out


def mrs_distribution_from_substitutes(pref: Preference, grid: int = 10_000) -> MRSDistribution:
    """Distribution of linear consumers that aggregates to a two-good substitute preference.

    The CDF of MRS is 1 - s1(t, 1); interior mass is discretised at ``grid``
    quantile midpoints. Linear populations and CES substitutes are handled
    exactly.
    """
    if pref.n != 2:
        raise DimensionError("decomposition into linear consumers is two-good")
    if isinstance(pref, Linear):
        return _exact_linear([(1.0, pref)])
    if isinstance(pref, Mixture) and all(isinstance(c, Linear) for _, c in pref.leaves()):
        return _exact_linear(pref.leaves())  # type: ignore[arg-type]
    if isinstance(pref, CobbDouglas):
        return MRSDistribution(np.empty(0), np.empty(0), pref.a[1], pref.a[0])
    if isinstance(pref, CES):
        if pref.sigma < 1:
            raise DomainError("CES with sigma < 1 exhibits complementarity")
        return ces_substitutes_linear_cdf(pref.a[0], pref.a[1], pref.sigma, grid)
    check_substitutes(pref)
    lo, hi = math.exp(-LOG_T_BOUND), math.exp(LOG_T_BOUND)
    s_lo, s_hi = _s1(pref, np.array([lo, hi]))
    mass_zero, mass_inf = 1.0 - float(s_lo), float(s_hi)
    interior = float(s_lo - s_hi)
    if interior <= 0:
        return MRSDistribution(np.empty(0), np.empty(0), mass_zero, 1.0 - mass_zero)
    # quantile u of the CDF F = 1 - s1  <=>  s1 level 1 - u
    u = mass_zero + interior * (np.arange(grid) + 0.5) / grid
    t = _first_below(lambda z: _s1(pref, z), 1.0 - u, lo, hi)
    t, w = _merge(t, np.full(grid, interior / grid))
    w[-1] += 1.0 - (w.sum() + mass_zero + mass_inf)
    return MRSDistribution(t, w, mass_zero, mass_inf, cdf_fn=lambda x: 1.0 - _s1(pref, np.atleast_1d(x)) - mass_zero)


def ces_substitutes_linear_cdf(a1: float, a2: float, sigma: float, grid: int = 10_000) -> MRSDistribution:
    """Closed-form MRS distribution of a two-good CES preference with sigma > 1.

    mu([0, t)) = (a2 t)^{sigma-1} / (a1^{sigma-1} + (a2 t)^{sigma-1}).
    """
    if not sigma > 1:
        raise DomainError("closed-form linear decomposition needs sigma > 1")
    k = sigma - 1.0

    def cdf(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            r = np.exp(k * (np.log(a1) - np.log(a2 * np.maximum(t, 0.0))))
        return 1.0 / (1.0 + r)

    def ppf(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return (a1 / a2) * np.exp((np.log(u) - np.log1p(-u)) / k)

    u = (np.arange(grid) + 0.5) / grid
    return MRSDistribution(ppf(u), np.full(grid, 1.0 / grid), 0.0, 0.0, cdf_fn=cdf, ppf_fn=ppf)


def linear_population_approximation(pref: Preference, eps: float, budget: float = 1.0) -> Population:
    """At most floor(1/eps) + 1 linear consumers whose aggregate shares are within eps.

    The share curve f = s1(., 1) is quantised to eps * floor(f / eps); each
    jump of the quantised curve becomes one linear consumer whose budget is
    the jump size.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if isinstance(pref, Linear):
        return Population.of([(pref, budget)])
    if pref.n != 2:
        raise DimensionError("two-good approximation")
    check_substitutes(pref)
    K = int(math.floor(1.0 / eps + 1e-12))
    levels = (np.arange(1, K + 1) - 1e-12) * eps
    z = _first_below(lambda t: _s1(pref, t), levels, math.exp(-LOG_T_BOUND), math.exp(LOG_T_BOUND))
    counted = z > 0
    pairs: list[tuple[Preference, float]] = []
    mass_zero = 1.0 - eps * int(counted.sum())
    if mass_zero > 1e-15:
        pairs.append((Linear((0.0, 1.0)), budget * mass_zero))
    for t in np.unique(z[counted]):
        c = int(np.sum(z == t))
        v = (1.0, 0.0) if np.isinf(t) else (float(t), 1.0)
        pairs.append((Linear(v), budget * eps * c))
    return Population.of(pairs)


# --- Leontief decompositions --------------------------------------------------

@dataclass(frozen=True)
class RatioDensity:
    """Distribution of the Leontief ratio z = v2/v1 given by quadrature.

    ``nodes``/``weights`` integrate against the distribution directly
    (weights include the density). ``coarse`` is an embedded lower-order
    rule on the same panels used for error estimates.
    """

    nodes: np.ndarray
    weights: np.ndarray
    phi: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)
    params: dict | None = None
    coarse: tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False, repr=False)

    def mass(self) -> float:
        return float(np.sum(self.weights))

    def to_dict(self) -> dict:
        if self.params and self.params.get("family") == "ces_complements":
            return {"family": "ces_complements", "A": self.params["A"], "sigma": self.params["sigma"]}
        return {"family": "atoms", "atoms": [{"z": float(z), "w": float(w)} for z, w in zip(self.nodes, self.weights)]}

    @classmethod
    def from_dict(cls, d: dict) -> "RatioDensity":
        if d.get("family") == "ces_complements":
            return ces_complements_density(float(d["A"]), float(d["sigma"]))
        atoms = d["atoms"]
        return cls(np.array([a["z"] for a in atoms], float), np.array([a["w"] for a in atoms], float))


def point_mass(c: float) -> RatioDensity:
    """All consumers share the Leontief ratio c."""
    return RatioDensity(np.array([float(c)]), np.array([1.0]))


def _ces_complements_phi(A: float, sigma: float) -> Callable[[np.ndarray], np.ndarray]:
    s, c = math.sin(math.pi * sigma), math.cos(math.pi * sigma)

    def phi(z):
        z = np.asarray(z, dtype=float)
        # z * phi(z) = (s / pi) / (t + 1/t - 2c) with t = z^{1-sigma} / A
        w = (1 - sigma) * np.log(z) - math.log(A)
        return (s / math.pi) / (z * 2.0 * (np.cosh(w) - c))

    return phi


def ces_complements_density(A: float, sigma: float, order: int = 16) -> RatioDensity:
    """Leontief-ratio density whose Stieltjes transform is 1 / (lam + A lam^sigma).

    phi(z) = sin(pi s) / (pi (A^{-1} z^{2-s} - 2 z cos(pi s) + A z^s)).
    Quadrature runs over w = (1 - s) ln z - ln A, where the density becomes
    sin(pi s) / (2 pi (1 - s) (cosh w - cos(pi s))).
    """
    if not 0 < sigma < 1:
        raise DomainError("Leontief decomposition of CES needs 0 < sigma < 1")
    if not A > 0:
        raise ValueError("A must be positive")
    s, c = math.sin(math.pi * sigma), math.cos(math.pi * sigma)
    W = min(45.0, 700.0 * (1 - sigma) - abs(math.log(A)))
    h = min(1.0, math.pi * sigma / 2, math.pi * (1 - sigma) / 2)
    panels = int(math.ceil(2 * W / h))

    def rule(k):
        w, g = gauss_legendre_panels(-W, W, panels, k)
        z = np.exp((w + math.log(A)) / (1 - sigma))
        return z, g * s / (2 * math.pi * (1 - sigma) * (np.cosh(w) - c))

    nodes, weights = rule(order)
    return RatioDensity(
        nodes, weights, phi=_ces_complements_phi(A, sigma),
        params={"family": "ces_complements", "A": float(A), "sigma": float(sigma)},
        coarse=rule(order // 2),
    )


def ces_complements_leontief_density(a1: float, a2: float, sigma: float) -> RatioDensity:
    """Density of v2/v1 reproducing the two-good CES preference with sigma in (0, 1)."""
    if not 0 < sigma < 1:
        raise DomainError("sigma must lie in (0, 1)")
    return ces_complements_density((a1 / a2) ** (1 - sigma), sigma)


def density_from_function(phi: Callable[[np.ndarray], np.ndarray], log_lo: float = -40.0, log_hi: float = 40.0,
                          panels: int = 400, order: int = 16) -> RatioDensity:
    """Quadrature for a user density on (0, inf), integrated over ln z."""

    def rule(k):
        y, g = gauss_legendre_panels(log_lo, log_hi, panels, k)
        z = np.exp(y)
        return z, g * phi(z) * z

    nodes, weights = rule(order)
    return RatioDensity(nodes, weights, phi=phi, coarse=rule(order // 2))


def stieltjes_transform(nu: RatioDensity, lam, tol: float = 1e-9) -> float | np.ndarray:
    """int dnu(z) / (lam + z), i.e. the demand D1((lam, 1), 1) of the completion."""
    lam_a = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_a <= 0):
        raise ValueError("lambda must be positive")
    val = (nu.weights[None, :] / (lam_a[:, None] + nu.nodes[None, :])).sum(axis=1)
    if nu.coarse is not None:
        cz, cw = nu.coarse
        est = np.abs(val - (cw[None, :] / (lam_a[:, None] + cz[None, :])).sum(axis=1))
        if np.any(est > tol):
            warnings.warn(f"Stieltjes quadrature error estimate {est.max():.2e} exceeds {tol:.0e}", ConvergenceWarning)
    return float(val[0]) if np.ndim(lam) == 0 else val


def stieltjes_perron_density(f: Callable[[complex], complex], z: float, eps: float = 1e-8) -> float:
    """Density recovered from a complex-evaluable Stieltjes transform f.

    phi(z) = (f(-z - i eps) - f(-z + i eps)) / (2 pi i) as eps -> 0.
    """
    return float(((f(complex(-z, -eps)) - f(complex(-z, eps))) / (2j * math.pi)).real)


# --- membership checks --------------------------------------------------------

@dataclass(frozen=True)
class DerivativeCheck:
    order: int
    value: float
    error: float
    sign_ok: bool
    conclusive: bool


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    checks: tuple[DerivativeCheck, ...]


def _richardson(estimates: list[float]) -> tuple[float, float]:
    """Neville extrapolation in h^2 for steps halving; returns value and error estimate."""
    T = [list(estimates)]
    for j in range(1, len(estimates)):
        prev = T[-1]
        T.append([prev[i + 1] + (prev[i + 1] - prev[i]) / (4**j - 1) for i in range(len(prev) - 1)])
    best = T[-1][0]
    err = abs(best - T[-2][-1]) if len(T) > 1 else abs(best)
    return best, err


def complete_monotonicity_check(pref: Preference, good: int, p, order: int = 6, h: float = 1e-2,
                                levels: int = 4, band: float = 1e-7) -> MonotonicityReport:
    """Check (-1)^k d^k D_good / dp_good^k >= 0 for k = 0..order by central differences.

    Steps start at h * p_good * 2^(levels-1) and halve; the estimates are
    Richardson-extrapolated. An order is conclusive when its magnitude clears
    the error estimate plus a relative band.
    """
    if not 0 <= order <= 6:
        raise ValueError("order must be in 0..6")
    p = np.asarray(p, dtype=float)
    x0 = float(p[good])

    def f(t: np.ndarray) -> np.ndarray:
        P = np.repeat(p[None, :], len(t), axis=0)
        P[:, good] = t
        return demand(pref, P, 1.0)[:, good]

    f0 = float(f(np.array([x0]))[0])
    checks = [DerivativeCheck(0, f0, 0.0, f0 >= 0, f0 > 0)]
    for k in range(1, order + 1):
        coef = np.array([(-1) ** j * math.comb(k, j) for j in range(k + 1)], dtype=float)
        offs = k / 2 - np.arange(k + 1)
        H0 = h * x0 * 2 ** (levels - 1)
        H0 = min(H0, 0.9 * x0 / max(offs.max(), 1.0))
        ests, rnd = [], 0.0
        for i in range(levels):
            H = H0 / 2**i
            vals = f(x0 + offs * H)
            ests.append(float(coef @ vals) / H**k)
            rnd = max(rnd, 4 * np.finfo(float).eps * float(np.abs(coef) @ np.abs(vals)) / H**k)
        val, err = _richardson(ests)
        err += rnd
        scale = math.factorial(k) * abs(f0) / x0**k
        tol = err + band * scale
        sign_ok = (-1) ** k * val >= -tol
        checks.append(DerivativeCheck(k, val, err, bool(sign_ok), bool(abs(val) > tol)))
    passed = all(c.sign_ok and c.conclusive for c in checks)
    return MonotonicityReport(passed, tuple(checks))


@dataclass(frozen=True)
class SignCheck:
    good: int
    wrt: tuple[int, ...]
    value: float
    error: float
    ok: bool


@dataclass(frozen=True)
class SignReport:
    passed: bool
    checks: tuple[SignCheck, ...]

    def worst(self) -> SignCheck:
        return min(self.checks, key=lambda c: c.value)


def mixed_log_partial(pref: Preference, i: int, J: tuple[int, ...], p, h: float = 1e-2,
                      levels: int = 4) -> tuple[float, float]:
    """d^q s_i / d ln p_{j1} ... d ln p_{jq} by central differences with Richardson."""
    y0 = np.log(np.asarray(p, dtype=float))
    q = len(J)
    signs = np.array(list(product((1.0, -1.0), repeat=q)))
    weight = signs.prod(axis=1)
    ests, rnd = [], 0.0
    for lv in range(levels):
        H = h * 2 ** (levels - 1 - lv)
        Y = np.repeat(y0[None, :], len(signs), axis=0)
        Y[:, list(J)] += H * signs
        s = expenditure_shares(pref, np.exp(Y))[:, i]
        ests.append(float(weight @ s) / (2 * H) ** q)
        rnd = max(rnd, 4 * np.finfo(float).eps * float(np.abs(s).sum()) / (2 * H) ** q)
    val, err = _richardson(ests)
    return val, err + rnd


def arum_sign_conditions_check(pref: Preference, p, q_max: int | None = None, h: float = 1e-2,
                               band: float = 1e-7) -> SignReport:
    """Mixed log-price derivatives of shares over distinct goods must be nonnegative.

    Necessary for membership in the closure of linear-preference aggregates.
    """
    n = pref.n
    q_max = n - 1 if q_max is None else q_max
    if not 1 <= q_max <= n - 1:
        raise ValueError("q_max must be in 1..n-1")
    checks = []
    for q in range(1, q_max + 1):
        for i in range(n):
            others = [j for j in range(n) if j != i]
            for J in combinations(others, q):
                val, err = mixed_log_partial(pref, i, J, p, h)
                checks.append(SignCheck(i, J, val, err, bool(val >= -(band + 10 * err))))
    return SignReport(all(c.ok for c in checks), tuple(checks))


# --- random-utility simulation -----------------------------------------------

@dataclass(frozen=True)
class ShockSpec:
    """i.i.d. additive utility shocks: ``gumbel`` (scale gamma) or ``normal`` (sd)."""

    kind: str = "gumbel"
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("gumbel", "normal"):
            raise ValueError("shock kind must be gumbel or normal")
        if not self.scale > 0:
            raise ValueError("shock scale must be positive")


@dataclass(frozen=True)
class ChoiceEstimate:
    probs: np.ndarray
    stderr: np.ndarray
    samples: int
    ties: int


def arum_choice_probabilities_mc(shocks: ShockSpec, w, samples: int, seed: int,
                                 chunk: int = 200_000) -> ChoiceEstimate:
    """Monte Carlo frequencies of argmax_i (w_i + eps_i); draws with ties are discarded."""
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples")
    w = np.asarray(w, dtype=float)
    rng = np.random.default_rng(seed)
    counts = np.zeros(len(w), dtype=np.int64)
    ties = 0
    left = samples
    while left > 0:
        k = min(chunk, left)
        if shocks.kind == "gumbel":
            eps = rng.gumbel(0.0, shocks.scale, size=(k, len(w)))
        else:
            eps = rng.normal(0.0, shocks.scale, size=(k, len(w)))
        U = w[None, :] + eps
        top = U.max(axis=1, keepdims=True)
        tied = (U == top).sum(axis=1) > 1
        ties += int(tied.sum())
        counts += np.bincount(U[~tied].argmax(axis=1), minlength=len(w))
        left -= k
    m = samples - ties
    probs = counts / m
    return ChoiceEstimate(probs, np.sqrt(probs * (1 - probs) / m), m, ties)


__all__ = [
    "ChoiceEstimate", "DerivativeCheck", "MRSDistribution", "MonotonicityReport", "RatioDensity", "ShockSpec",
    "SignCheck", "SignReport", "arum_choice_probabilities_mc", "arum_sign_conditions_check", "ces_complements_density",
    "ces_complements_leontief_density", "ces_substitutes_linear_cdf", "check_substitutes",
    "complete_monotonicity_check", "density_from_function", "linear_population_approximation",
    "mixed_log_partial", "mrs_distribution_from_substitutes", "point_mass", "stieltjes_perron_density",
    "stieltjes_transform",
]
