import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import any_pref, positive, simplex
from homothetic import (
    CES,
    CobbDouglas,
    Leontief,
    Linear,
    Mixture,
    Population,
    Translog,
    aggregate_population,
    demand,
    log_expenditure,
    utility,
)
from homothetic.aggregate import (
    QuadratureMeasure,
    aggregate_continuous,
    contour_sample,
    density_measure,
    eisenberg_gale_primal,
    quantile_measure,
    uniform_log_mrs_measure,
)
from homothetic.decompose import ces_complements_leontief_density


def test_single_minded_agents_aggregate_to_cobb_douglas():
    agg = aggregate_population(Population.of([(Linear((1, 0)), 1), (Linear((0, 1)), 2)]))
    assert isinstance(agg, CobbDouglas)
    np.testing.assert_allclose(agg.a, [1 / 3, 2 / 3], atol=1e-15)


def test_single_agent_is_weight_one_mixture():
    pref = CES((0.4, 0.6), 0.3)
    agg = aggregate_population(Population.of([(pref, 5.0)]))
    assert isinstance(agg, Mixture)
    assert agg.weights == (1.0,) and agg.components == (pref,)


def test_cobb_douglas_average():
    agg = aggregate_population(Population.of([(CobbDouglas((0.2, 0.8)), 1), (CobbDouglas((0.6, 0.4)), 1)]))
    assert isinstance(agg, CobbDouglas)
    np.testing.assert_allclose(agg.a, [0.4, 0.6], atol=1e-15)


def test_other_families_stay_explicit_mixtures():
    agg = aggregate_population(Population.of([(CES((0.5, 0.5), 2), 1), (Translog(0.5, 0.5), 1)]))
    assert isinstance(agg, Mixture) and len(agg.components) == 2


@given(st.lists(any_pref(3), min_size=1, max_size=5), st.lists(st.floats(0.1, 10), min_size=5, max_size=5),
       positive(3, 0.1, 10))
def test_demand_additivity(prefs, budgets, p):
    pop = Population.of(list(zip(prefs, budgets)))
    agg = aggregate_population(pop)
    p = np.array(p)
    if any(not demand(pr, p, 1.0, detail=True).unique for pr in prefs):
        return
    total = sum(oracles.individual_demand(a.pref.to_dict(), p, a.budget) for a in pop.agents)
    np.testing.assert_allclose(demand(agg, p, pop.B), total, rtol=1e-6, atol=1e-6 * pop.B / p.min())


@given(st.lists(any_pref(2), min_size=2, max_size=6), st.lists(st.floats(0.1, 10), min_size=6, max_size=6),
       st.integers(1, 5))
def test_associativity(prefs, budgets, cut):
    cut = min(cut, len(prefs) - 1)
    pairs = list(zip(prefs, budgets))
    whole = aggregate_population(Population.of(pairs))
    p1, p2 = Population.of(pairs[:cut]), Population.of(pairs[cut:])
    nested = aggregate_population(Population.of([(aggregate_population(p1), p1.B), (aggregate_population(p2), p2.B)]))
    P = np.exp(np.random.default_rng(0).normal(size=(20, 2)))
    np.testing.assert_allclose(log_expenditure(whole, P), log_expenditure(nested, P), atol=1e-12)


# --- continuous aggregation ------------------------------------------------------------------

def test_logit_quantile_measure_reproduces_ces():
    mu = quantile_measure(lambda u: u / (1 - u), 10_000)
    ces = CES((0.5, 0.5), 2.0)
    P = np.column_stack([np.geomspace(0.1, 10, 25), np.ones(25)])
    got = aggregate_continuous(mu, P)
    exact = log_expenditure(ces, P)
    assert np.max(np.abs((got - got[12]) - (exact - exact[12]))) < 2e-3


def test_logit_quadrature_oracle_agrees_with_closed_form():
    # the mixture integral itself, computed adaptively, differs from CES by a constant
    ces = CES((0.5, 0.5), 2.0)
    diffs = [oracles.ces2_from_logit(p) - log_expenditure(ces, p) for p in ([0.3, 1], [1, 1], [4, 1], [1, 7])]
    assert max(diffs) - min(diffs) < 1e-8


def test_symmetric_complements_density_reproduces_ces():
    nu = ces_complements_leontief_density(0.5, 0.5, 0.5)
    mu = density_measure(nu)
    ces = CES((0.5, 0.5), 0.5)
    for p in ([1, 1], [2, 1], [0.1, 3], [5, 0.2]):
        # ln E of CES 1/2 symmetric is ln(p1 + p2 + 2 sqrt(p1 p2)) - ln 4 up to a constant
        assert aggregate_continuous(mu, p) - aggregate_continuous(mu, [1, 1]) == pytest.approx(
            log_expenditure(ces, p) - log_expenditure(ces, [1, 1]), abs=1e-4)


def test_uniform_log_mrs_is_translog():
    mu = uniform_log_mrs_measure(-1, 1)
    t = Translog(0.5, 0.5)
    for z in (-2.0, -0.7, 0.0, 0.3, 0.99, 1.5, 3.0):
        p = (math.exp(z), 1.0)
        got = aggregate_continuous(mu, p)
        assert got == pytest.approx(oracles.translog_mixture(p), abs=1e-9)
        assert got - aggregate_continuous(mu, [1, 1]) == pytest.approx(log_expenditure(t, p), abs=1e-6)


def test_measure_validation():
    with pytest.raises(ValueError):
        QuadratureMeasure("linear_mrs", [], [])
    with pytest.raises(ValueError):
        QuadratureMeasure("linear_mrs", [1.0, 2.0], [0.7, 0.7])
    with pytest.raises(ValueError):
        QuadratureMeasure("leontief_ratio", [-1.0], [1.0])
    with pytest.raises(ValueError):
        QuadratureMeasure("nope", [1.0], [1.0])


def test_linear_measure_endpoints():
    mu = QuadratureMeasure("linear_mrs", [0.0, math.inf], [0.5, 0.5])
    # single-minded on good 2 and on good 1: geometric mean of prices
    assert aggregate_continuous(mu, [4, 9]) == pytest.approx(0.5 * math.log(36))
    pref = mu.to_preference()
    assert log_expenditure(pref, [4, 9]) == pytest.approx(0.5 * math.log(36))


# --- contours ----------------------------------------------------------------------------------

def test_geometric_mean_of_halfspaces():
    agg = aggregate_population(Population.of([(Linear((1, 0)), 1), (Linear((0, 1)), 1)]))
    pts = contour_sample(agg, 1.0, 16)
    interior = [pt for pt in pts if pt.x is not None]
    assert len(interior) == 15  # the two axis rays never reach the contour
    for pt in interior:
        assert pt.x[0] * pt.x[1] == pytest.approx(0.25, rel=1e-10)


def test_leontief_contour_diagonal():
    pts = contour_sample(Leontief((1, 1)), 1.0, 8)
    diag = [pt for pt in pts if abs(pt.angles[0] - math.pi / 4) < 1e-12][0]
    np.testing.assert_allclose(diag.x, [1, 1], atol=1e-12)


def test_linear_contour_segment():
    for pt in contour_sample(Linear((1, 1)), 1.0, 12):
        assert pt.x is not None and pt.x.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("pref", [CES((0.2, 0.3, 0.5), 0.5), CobbDouglas((0.2, 0.3, 0.5)), Leontief((1, 2, 3))])
def test_contour_points_are_on_level_three_goods(pref):
    for pt in contour_sample(pref, 2.0, 8):
        if pt.x is not None:
            assert utility(pref, pt.x) == pytest.approx(2.0, abs=1e-6)


def test_contour_arguments():
    with pytest.raises(ValueError):
        contour_sample(Leontief((1, 1)), 1.0, 4)


# --- Eisenberg-Gale ------------------------------------------------------------------------------

def test_eg_single_minded_pair():
    r = eisenberg_gale_primal(Population.of([(Linear((1, 0)), 1), (Linear((0, 1)), 1)]), [1, 1])
    assert r.value == pytest.approx(2.0, abs=1e-6)


def test_eg_single_agent():
    pref = CES((0.3, 0.7), 0.6)
    r = eisenberg_gale_primal(Population.of([(pref, 2.0)]), [1, 3])
    assert r.value == pytest.approx(utility(pref, [1, 3]))


def test_eg_identical_leontief():
    r = eisenberg_gale_primal(Population.of([(Leontief((1, 1)), 1), (Leontief((1, 1)), 1)]), [2, 2])
    assert r.value == pytest.approx(2.0, abs=1e-6)
    np.testing.assert_allclose(r.allocation.sum(axis=0), [2, 2], atol=1e-6)


@pytest.mark.parametrize("seed", range(4))
def test_eg_matches_dual_utility_of_aggregate(seed):
    rng = np.random.default_rng(seed)
    n, m = 3, 4
    prefs = [Linear(tuple(rng.uniform(0.2, 2, n))), Leontief(tuple(rng.uniform(0.2, 2, n))),
             CobbDouglas(tuple(rng.dirichlet(np.ones(n)))), CES(tuple(rng.dirichlet(np.ones(n))), 0.5)]
    pop = Population.of([(p, float(b)) for p, b in zip(prefs, rng.uniform(0.5, 2, m))])
    x = rng.uniform(0.5, 2, n)
    r = eisenberg_gale_primal(pop, x)
    assert r.value == pytest.approx(utility(aggregate_population(pop), x), rel=1e-4)
