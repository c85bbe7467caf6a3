"""Fisher-market equilibria through the convex dual in log prices.

Equilibrium prices minimise phi(p) = <X, p> - sum_k b_k ln E_k(p). In
q = ln p the gradient is X * p - B s(p), so a stationary point clears the
market. Linear and piecewise-linear consumers are handled by a soft-min
smoothing homotopy; ties at the final prices are resolved by a small LP that
minimises the price-weighted excess demand, which is also the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .decompose import check_substitutes, linear_population_approximation
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
    Translog,
    TwoGoodQ,
    log_expenditure,
    share_packets,
)

GAMMA_SCHEDULE = tuple(10.0 ** -k for k in range(0, 11))
TIE_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumResult:
    """Prices, per-agent bundles and the certified epsilon gap <p, |excess|> / B."""

    prices: np.ndarray
    allocations: np.ndarray
    gap: float
    objective: float
    iterations: int
    converged: bool

    @property
    def certified(self) -> bool:
        return self.converged


def _flatten(pop: Population) -> list[tuple[float, Preference]]:
    out = []
    for a in pop.agents:
        if isinstance(a.pref, Mixture):
            out.extend((a.budget * w, leaf) for w, leaf in a.pref.leaves())
        else:
            out.append((a.budget, a.pref))
    return out


def _softmax_rows(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = Z.max(axis=1, keepdims=True)
    E = np.exp(Z - m)
    tot = E.sum(axis=1, keepdims=True)
    return E / tot, (m + np.log(tot))[:, 0]


class _DualModel:
    """Budget-weighted sum of log-expenditures with shares and share Jacobian in ln p."""

    def __init__(self, pop: Population) -> None:
        n = pop.n
        self.n = n
        self.cd = np.zeros(n)
        lin_v, lin_w, leo_v, leo_w = [], [], [], []
        self.pwl: list[tuple[float, np.ndarray]] = []
        self.other: list[tuple[float, Preference]] = []
        for w, leaf in _flatten(pop):
            if type(leaf) is CobbDouglas:
                self.cd += w * np.asarray(leaf.a)
            elif type(leaf) is Linear:
                lin_v.append(leaf.logv)
                lin_w.append(w)
            elif type(leaf) is Leontief:
                leo_v.append(leaf.v)
                leo_w.append(w)
            elif type(leaf) is PiecewiseLinearE:
                self.pwl.append((w, np.asarray(leaf.C)))
            else:
                self.other.append((w, leaf))
        self.lin = (np.asarray(lin_v), np.asarray(lin_w)) if lin_v else None
        self.leo = (np.asarray(leo_v, dtype=float), np.asarray(leo_w)) if leo_v else None
        self.needs_smoothing = self.lin is not None or bool(self.pwl)

    def eval(self, q: np.ndarray, gamma: float) -> tuple[float, np.ndarray, np.ndarray]:
        n = self.n
        p = np.exp(q)
        L = float(self.cd @ q)
        S = self.cd.copy()
        J = np.zeros((n, n))
        if self.lin is not None:
            logv, w = self.lin
            A = q[None, :] - logv
            if gamma > 0:
                Sm, lse = _softmax_rows(-A / gamma)
                L += float(w @ (-gamma * lse))
                S += w @ Sm
                J -= (np.diag(w @ Sm) - Sm.T @ (w[:, None] * Sm)) / gamma
            else:
                m = A.min(axis=1)
                L += float(w @ m)
                idx = A.shape[1] - 1 - np.argmax((A <= m[:, None] + 1e-12)[:, ::-1], axis=1)
                np.add.at(S, idx, w)
        if self.leo is not None:
            V, w = self.leo
            T = V * p[None, :]
            tot = T.sum(axis=1)
            Sm = T / tot[:, None]
            L += float(w @ np.log(tot))
            S += w @ Sm
            J += np.diag(w @ Sm) - Sm.T @ (w[:, None] * Sm)
        for w, M in self.pwl:
            T = M * p[None, :]
            tot = T.sum(axis=1)
            Sc = T / tot[:, None]
            ell = np.log(tot)
            if gamma > 0:
                pi, lse = _softmax_rows((-ell / gamma)[None, :])
                pi = pi[0]
                s = pi @ Sc
                L += w * float(-gamma * lse[0])
                Jc = np.diag(s) - Sc.T @ (pi[:, None] * Sc) - (Sc.T * pi) @ (Sc - s[None, :]) / gamma
            else:
                c = int(np.argmin(ell))
                s = Sc[c]
                L += w * float(ell[c])
                Jc = np.diag(s) - np.outer(s, s)
            S += w * s
            J += w * Jc
        for w, leaf in self.other:
            l, s, Jl = _leaf_terms(leaf, q)
            L += w * l
            S += w * s
            J += w * Jl
        return L, S, J


def _leaf_terms(leaf: Preference, q: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    P = np.exp(q)[None, :]
    l = float(leaf._logexp(P)[0])
    s = leaf._shares(P)[0]
    if isinstance(leaf, CES):
        J = (1 - leaf.sigma) * (np.diag(s) - np.outer(s, s))
    elif isinstance(leaf, Translog):
        lo, hi = leaf.breaks
        z = q[0] - q[1]
        d = -leaf.beta if lo < z < hi else 0.0
        J = d * np.array([[1.0, -1.0], [-1.0, 1.0]])
    elif isinstance(leaf, TwoGoodQ):
        z = math.exp(q[0] - q[1])
        Q = float(leaf.Q(z))
        d = z * Q / (z + Q) ** 2 if 0 < Q < math.inf else 0.0
        J = d * np.array([[1.0, -1.0], [-1.0, 1.0]])
    else:
        h = 1e-6
        J = np.empty((len(q), len(q)))
        for j in range(len(q)):
            e = np.zeros(len(q))
            e[j] = h
            J[:, j] = (leaf._shares(np.exp(q + e)[None, :])[0] - leaf._shares(np.exp(q - e)[None, :])[0]) / (2 * h)
    return l, s, J


# --- certificate and allocation -----------------------------------------------

def best_allocation(pop: Population, X, p, tie_tol: float = TIE_TOL) -> tuple[np.ndarray, float]:
    """Per-agent optimal bundles at prices p minimising <p, |X - sum_k x_k|>.

    Returns ``(allocations, gap)`` with gap = <p, |excess|> / B.
    """
    X = np.asarray(X, dtype=float)
    p = np.asarray(p, dtype=float)
    n, m = pop.n, pop.m
    fixed = np.zeros((m, n))
    packets: list[tuple[int, float, np.ndarray]] = []
    for k, a in enumerate(pop.agents):
        f, pk = share_packets(a.pref, p, tie_tol)
        fixed[k] = a.budget * f / p
        for w, cand in pk:
            if w > 0:
                packets.append((k, a.budget * w, cand))
            else:
                order = np.lexsort((w * cand / p).T[::-1])
                fixed[k] += a.budget * w * cand[order[0]] / p
    alloc = fixed.copy()
    if packets:
        nv = sum(len(c) for _, _, c in packets)
        # variables: lambda (nv) then e (n); minimise p.e
        c = np.concatenate([np.zeros(nv), p])
        A_ub = np.zeros((2 * n, nv + n))
        b_ub = np.zeros(2 * n)
        A_eq = np.zeros((len(packets), nv + n))
        b_eq = np.zeros(len(packets))
        base = fixed.sum(axis=0)
        col = 0
        for r, (k, bud, cand) in enumerate(packets):
            B_c = (cand / p).T  # n x c, bundle per unit budget
            A_ub[:n, col:col + len(cand)] = -B_c
            A_ub[n:, col:col + len(cand)] = B_c
            A_eq[r, col:col + len(cand)] = 1.0
            b_eq[r] = bud
            col += len(cand)
        # e >= X - d  and  e >= d - X
        A_ub[:n, nv:] = -np.eye(n)
        A_ub[n:, nv:] = -np.eye(n)
        b_ub[:n] = -(X - base)
        b_ub[n:] = X - base
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=[(0, None)] * (nv + n), method="highs")
        if res.status == 0:
            lam = res.x[:nv]
            col = 0
            for k, bud, cand in packets:
                alloc[k] += lam[col:col + len(cand)] @ (cand / p)
                col += len(cand)
        else:  # pragma: no cover - LP is always feasible
            for k, bud, cand in packets:
                alloc[k] += bud * cand[0] / p
    alloc = np.maximum(alloc, 0.0)
    excess = np.abs(X - alloc.sum(axis=0))
    return alloc, float(p @ excess) / pop.B


def verify_epsilon_equilibrium(pop: Population, X, p, eps: float, tie_tol: float = TIE_TOL) -> tuple[bool, float]:
    """Whether p is an eps-equilibrium, using the best selection among demand ties."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("prices must be strictly positive")
    _, gap = best_allocation(pop, X, p, tie_tol)
    return gap <= eps, gap


def dual_objective(pop: Population, X, p) -> float:
    """<X, p> - sum_k b_k ln E_k(p)."""
    p = np.asarray(p, dtype=float)
    return float(np.asarray(X) @ p - sum(a.budget * log_expenditure(a.pref, p) for a in pop.agents))


# --- solver ----------------------------------------------------------------------

def _newton(model: _DualModel, X: np.ndarray, B: float, q: np.ndarray, gamma: float, tol: float,
            max_iter: int) -> tuple[np.ndarray, int, bool]:
    Xn = float(np.linalg.norm(X))

    def phi(qq):
        L, S, J = model.eval(qq, gamma)
        return float(X @ np.exp(qq)) - L, S, J

    f, S, J = phi(q)
    for it in range(1, max_iter + 1):
        p = np.exp(q)
        g = X * p - S
        D = S / p
        if np.linalg.norm(D - X) <= tol * (1 + Xn):
            return q, it - 1, True
        H = np.diag(X * p) - J
        H = (H + H.T) / 2
        mu = 0.0
        scale = max(1e-300, float(np.abs(np.diag(H)).max()))
        for _ in range(60):
            try:
                Lc = np.linalg.cholesky(H + mu * np.eye(len(q)))
                d = -np.linalg.solve(Lc.T, np.linalg.solve(Lc, g))
                break
            except np.linalg.LinAlgError:
                mu = max(1e-12 * scale, 10 * mu)
        else:
            d = -g / np.maximum(np.abs(np.diag(H)), 1e-12)
        # keep steps in log prices bounded
        big = float(np.abs(d).max())
        if big > 5.0:
            d *= 5.0 / big
        slope = float(g @ d)
        t = 1.0
        improved = False
        for _ in range(60):
            qn = q + t * d
            fn, Sn, Jn = phi(qn)
            if fn <= f + 1e-4 * t * slope or abs(fn - f) <= 1e-15 * max(1.0, abs(f)):
                improved = fn <= f + 1e-12 * max(1.0, abs(f))
                break
            t /= 2
        if not improved:
            # no further decrease possible at machine precision
            return q, it, float(np.abs(g).sum()) / B <= tol
        q, f, S, J = qn, fn, Sn, Jn
    return q, max_iter, False


def solve_equilibrium(pop: Population, X, tol: float = 1e-9, max_iter: int = 200) -> EquilibriumResult:
    """Equilibrium prices of a Fisher market with fixed supply X.

    Minimises the dual in log prices by damped Newton starting from
    p_i = B / (n X_i). The returned gap is certified by
    :func:`verify_epsilon_equilibrium`.
    """
    X = np.asarray(X, dtype=float).reshape(-1)
    if X.shape[0] != pop.n:
        raise DimensionError("supply dimension does not match the population")
    if np.any(X <= 0):
        raise ValueError("supply must be strictly positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    B, n = pop.B, pop.n
    q = np.log(B / (n * X))
    model = _DualModel(pop)
    total = 0
    if model.needs_smoothing:
        ok = True
        for gamma in GAMMA_SCHEDULE:
            stage_tol = tol if gamma == GAMMA_SCHEDULE[-1] else max(tol, 1e-3 * gamma)
            q, its, ok = _newton(model, X, B, q, gamma, stage_tol, max_iter)
            total += its
    else:
        q, total, ok = _newton(model, X, B, q, 0.0, tol, max_iter)
    p = np.exp(q)
    alloc, gap = best_allocation(pop, X, p)
    converged = bool(ok) or gap <= tol
    if model.needs_smoothing:
        converged = gap <= max(tol, 1e-8)
    return EquilibriumResult(p, alloc, gap, dual_objective(pop, X, p), total, converged)


def solve_equilibrium_finitely_generated(generators: Sequence[Preference], coeffs, budgets, X,
                                         tol: float = 1e-9) -> EquilibriumResult:
    """Equilibrium when every agent's ln E is a convex combination of q generators.

    Only the budget-weighted average coefficient vector matters, so a single
    aggregate consumer is solved and allocations are recovered per agent.
    """
    T = np.atleast_2d(np.asarray(coeffs, dtype=float))
    b = np.asarray(budgets, dtype=float).reshape(-1)
    if T.shape != (len(b), len(generators)):
        raise ValueError("need one coefficient vector per agent, one entry per generator")
    if np.any(T < -1e-12) or np.any(np.abs(T.sum(axis=1) - 1) > 1e-9):
        raise ValueError("coefficient vectors must lie in the simplex")
    T = np.clip(T, 0.0, None)
    T /= T.sum(axis=1, keepdims=True)

    def mix(t: np.ndarray) -> Preference:
        keep = np.flatnonzero(t > 0)
        if len(keep) == 1:
            return generators[keep[0]]
        return Mixture(tuple(t[keep] / t[keep].sum()), tuple(generators[i] for i in keep))

    beta = b / b.sum()
    t_agg = beta @ T
    res = solve_equilibrium(Population.of([(mix(t_agg), float(b.sum()))]), X, tol)
    expanded = Population.of([(mix(t), bk) for t, bk in zip(T, b)])
    alloc, gap = best_allocation(expanded, X, res.prices)
    return EquilibriumResult(res.prices, alloc, gap, dual_objective(expanded, X, res.prices), res.iterations,
                             res.converged and gap <= max(tol, 1e-8))


@dataclass(frozen=True)
class ApproxEquilibrium:
    """Prices from the linear surrogate market and their certificate on the original one."""

    prices: np.ndarray
    gap: float
    surrogate_gap: float
    surrogate: Population


def approx_equilibrium_two_goods(pop: Population, X, eps: float,
                                 solver: Callable[[Population, np.ndarray, float], EquilibriumResult] | None = None
                                 ) -> ApproxEquilibrium:
    """Approximate equilibrium of a two-good substitutes market via linear surrogates.

    Each agent is replaced by at most floor(1/eps) + 1 linear agents whose
    shares are within eps of the original; an equilibrium of that market is
    a (gap + 2 eps)-equilibrium of the original.
    """
    if pop.n != 2:
        raise DimensionError("two-good markets only")
    for a in pop.agents:
        check_substitutes(a.pref)
    pairs = []
    for a in pop.agents:
        pairs.extend((ag.pref, ag.budget) for ag in linear_population_approximation(a.pref, eps, a.budget).agents)
    surrogate = Population.of(pairs)
    solve = solver or solve_equilibrium
    res = solve(surrogate, np.asarray(X, dtype=float), min(eps, 1e-8))
    _, gap = best_allocation(pop, X, res.prices)
    return ApproxEquilibrium(res.prices, gap, res.gap, surrogate)


__all__ = [
    "ApproxEquilibrium", "EquilibriumResult", "approx_equilibrium_two_goods", "best_allocation", "dual_objective",
    "solve_equilibrium", "solve_equilibrium_finitely_generated", "verify_epsilon_equilibrium",
]
