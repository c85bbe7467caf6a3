"""Independent reference computations used by the tests.

Everything here is written from the defining formulas with plain loops,
scipy quadrature or scipy optimisation, without calling the package's
numerical code, so that agreement is a genuine cross-check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize


# --- log-expenditure from first principles -----------------------------------------

def log_e(d: dict, p) -> float:
    """ln E(p) from a preference description, evaluated with scalar loops."""
    p = [float(x) for x in p]
    k = d["kind"]
    if k == "linear":
        return math.log(min(pi / vi for pi, vi in zip(p, d["v"]) if vi > 0))
    if k == "leontief":
        return math.log(sum(vi * pi for vi, pi in zip(d["v"], p)))
    if k == "cobb_douglas":
        return sum(ai * math.log(pi) for ai, pi in zip(d["a"], p) if ai > 0)
    if k == "ces":
        s = d["sigma"]
        tot = sum((pi / ai) ** (1 - s) for pi, ai in zip(p, d["a"]))
        return math.log(tot) / (1 - s)
    if k == "pwl":
        return math.log(min(sum(ci * pi for ci, pi in zip(c, p)) for c in d["C"]))
    if k == "mixture":
        return sum(w * log_e(c, p) for w, c in zip(d["weights"], d["components"]))
    if k == "translog":
        return translog_by_quadrature(d["alpha"], d["beta"], p)
    raise KeyError(k)


def translog_by_quadrature(alpha: float, beta: float, p) -> float:
    """ln E of the translog preference as an integral of log shares.

    s1(z) = clip(alpha - beta z, 0, 1) with z = ln(p1/p2); ln E(p) - ln p2
    is the integral of s1 from 0 to z, anchored at ln E(1, 1) = 0.
    """
    z = math.log(p[0] / p[1])

    def s1(t):
        return min(max(alpha - beta * t, 0.0), 1.0)

    brk = [-(1 - alpha) / beta, alpha / beta]
    pts = [b for b in brk if min(0, z) < b < max(0, z)]
    val, _ = integrate.quad(s1, 0.0, z, points=pts or None, epsabs=1e-13, epsrel=1e-13)
    return math.log(p[1]) + val


def fd_shares(d: dict, p, h: float = 1e-5) -> np.ndarray:
    """Shares by central differences of the oracle ln E in log prices."""
    p = np.asarray(p, dtype=float)
    out = np.empty(len(p))
    for i in range(len(p)):
        up, dn = p.copy(), p.copy()
        up[i] *= math.exp(h)
        dn[i] *= math.exp(-h)
        out[i] = (log_e(d, up) - log_e(d, dn)) / (2 * h)
    return out


def individual_demand(d: dict, p, b: float) -> np.ndarray:
    """Demand of one consumer: argmax for linear, gradient of ln E otherwise."""
    p = np.asarray(p, dtype=float)
    if d["kind"] == "linear":
        v = np.asarray(d["v"], dtype=float)
        x = np.zeros(len(p))
        i = int(np.argmax(v / p))
        x[i] = b / p[i]
        return x
    return b * fd_shares(d, p) / p


# --- primal expenditure minimisation ----------------------------------------------

def expenditure_by_minimisation(u, p, x0) -> float:
    """min <p, x> subject to u(x) >= 1, x >= 0, by SLSQP."""
    p = np.asarray(p, dtype=float)
    res = optimize.minimize(
        lambda x: float(p @ x), np.asarray(x0, dtype=float), method="SLSQP",
        bounds=[(1e-9, None)] * len(p),
        constraints=[{"type": "ineq", "fun": lambda x: u(x) - 1.0}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    return float(res.fun)


# --- continuous aggregation oracles -----------------------------------------------

def ces2_from_logit(p) -> float:
    """int ln min(p1 / t, p2) d(t / (1 + t)) over (0, inf), by adaptive quadrature."""
    p1, p2 = map(float, p)
    z = p1 / p2

    def f(t):
        return math.log(min(p1 / t, p2)) / (1 + t) ** 2

    a, _ = integrate.quad(f, 0, z, epsabs=1e-12, limit=200)
    b, _ = integrate.quad(f, z, np.inf, epsabs=1e-12, limit=200)
    return a + b


def translog_mixture(p, lo: float = -1.0, hi: float = 1.0) -> float:
    """Average over uniform c of ln min(p1 e^{-c/2}, p2 e^{c/2})."""
    p1, p2 = map(float, p)
    c0 = math.log(p1 / p2)

    def f(c):
        return min(math.log(p1) - c / 2, math.log(p2) + c / 2)

    pts = [c0] if lo < c0 < hi else None
    val, _ = integrate.quad(f, lo, hi, points=pts, epsabs=1e-13, epsrel=1e-13)
    return val / (hi - lo)


def complements_density(z: float, A: float, sigma: float) -> float:
    """Density of v2/v1 for two-good CES complements, written out directly."""
    s = math.sin(math.pi * sigma)
    c = math.cos(math.pi * sigma)
    return s / (math.pi * (z ** (2 - sigma) / A - 2 * z * c + A * z**sigma))


def density_integral(g, A: float, sigma: float) -> float:
    """int_0^inf g(z) phi(z) dz by adaptive quadrature split at 1."""
    f = lambda z: g(z) * complements_density(z, A, sigma)
    a, _ = integrate.quad(f, 0, 1, epsabs=1e-13, epsrel=1e-12, limit=400)
    b, _ = integrate.quad(f, 1, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    return a + b


# --- welfare ------------------------------------------------------------------------

def two_population_extremes(w, target: float, B: float, grid: int = 2001) -> tuple[float, float]:
    """Brute-force min and max of B (lam w(a1) + (1 - lam) w(a2)) over pairs bracketing target."""
    a = np.linspace(0.0, 1.0, grid)
    wv = np.array([w(x) for x in a])
    lo_i = a <= target
    hi_i = a >= target
    best_lo, best_hi = math.inf, -math.inf
    for i in np.flatnonzero(lo_i):
        for j in np.flatnonzero(hi_i):
            if a[j] == a[i]:
                val = wv[i]
            else:
                lam = (a[j] - target) / (a[j] - a[i])
                val = lam * wv[i] + (1 - lam) * wv[j]
            best_lo = min(best_lo, val)
            best_hi = max(best_hi, val)
    return B * best_lo, B * best_hi


def ev_upper_by_linear_decomposition(cdf_density, change_p0, change_p1) -> float:
    """int EV_linear(t) dmu(t) for an absolutely continuous MRS law, by adaptive quadrature."""
    z0 = change_p0[0] / change_p0[1]
    z1 = change_p1[0] / change_p1[1]
    c = change_p0[1] / change_p1[1]

    def g(t):
        return c * min(z0, t) / min(z1, t) - 1.0

    pts = sorted({z0, z1})
    total = 0.0
    edges = [0.0] + pts + [np.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(lambda t: g(t) * cdf_density(t), a, b, epsabs=1e-13, epsrel=1e-12, limit=400)
        total += v
    return total


# --- Fisher ---------------------------------------------------------------------------

def cobb_douglas_prices(A: np.ndarray, b: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Clearing prices p_j = sum_k b_k a_kj / X_j."""
    return (b @ A) / X


def price_weighted_excess(allocs: np.ndarray, X: np.ndarray, p: np.ndarray, B: float) -> float:
    return float(np.abs(X - allocs.sum(axis=0)) @ p) / B
