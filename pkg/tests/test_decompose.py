import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import positive
from homothetic import (
    CES,
    CobbDouglas,
    ConvergenceWarning,
    DomainError,
    Leontief,
    Linear,
    Mixture,
    Translog,
    aggregate_population,
    expenditure_shares,
    log_expenditure,
)
from homothetic.aggregate import aggregate_continuous
from homothetic.decompose import (
    MRSDistribution,
    RatioDensity,
    ShockSpec,
    arum_choice_probabilities_mc,
    arum_sign_conditions_check,
    ces_complements_density,
    ces_complements_leontief_density,
    ces_substitutes_linear_cdf,
    check_substitutes,
    complete_monotonicity_check,
    density_from_function,
    linear_population_approximation,
    mixed_log_partial,
    mrs_distribution_from_substitutes,
    point_mass,
    stieltjes_perron_density,
    stieltjes_transform,
)


def e3(alpha):
    return Mixture((1 - alpha, alpha), (Leontief((1, 1, 1)), CobbDouglas((1 / 3, 1 / 3, 1 / 3))), signed=True)


# --- MRS distributions ------------------------------------------------------------------------

def test_ces_substitutes_cdf_is_logit():
    mu = mrs_distribution_from_substitutes(CES((0.5, 0.5), 2.0))
    t = np.array([0.1, 1.0, 3.0, 20.0])
    np.testing.assert_allclose(mu.cdf(t), t / (1 + t), atol=1e-14)
    assert mu.mass_zero == 0 and mu.mass_inf == 0
    assert mu.w.sum() == pytest.approx(1.0, abs=1e-12)


def test_linear_is_its_own_decomposition():
    mu = mrs_distribution_from_substitutes(Linear((2, 1)))
    np.testing.assert_allclose(mu.t, [2.0])
    np.testing.assert_allclose(mu.w, [1.0])


def test_translog_log_mrs_uniform():
    mu = mrs_distribution_from_substitutes(Translog(0.5, 0.5), grid=4000)
    ln_t = np.log(mu.t)
    assert ln_t.min() > -1 and ln_t.max() < 1
    np.testing.assert_allclose(mu.cdf(np.exp([-0.5, 0.0, 0.5])), [0.25, 0.5, 0.75], atol=1e-12)
    # quantile midpoints of a uniform law
    np.testing.assert_allclose(np.sort(ln_t), -1 + 2 * (np.arange(4000) + 0.5) / 4000, atol=1e-9)


def test_cobb_douglas_decomposes_into_endpoints():
    mu = mrs_distribution_from_substitutes(CobbDouglas((0.3, 0.7)))
    assert mu.t.size == 0
    assert mu.mass_zero == pytest.approx(0.7) and mu.mass_inf == pytest.approx(0.3)
    agg = aggregate_population(mu.to_population(1.0))
    np.testing.assert_allclose(agg.a, [0.3, 0.7])


def test_complements_rejected():
    with pytest.raises(DomainError):
        mrs_distribution_from_substitutes(CES((0.5, 0.5), 0.5))
    with pytest.raises(DomainError):
        check_substitutes(Leontief((1, 2)))


def test_closed_form_cdf_values():
    mu = ces_substitutes_linear_cdf(0.3, 0.7, 2.5)
    assert mu.cdf(np.array([0.3 / 0.7]))[0] == pytest.approx(0.5)
    assert ces_substitutes_linear_cdf(0.5, 0.5, 2.0).cdf(np.array([3.0]))[0] == pytest.approx(0.75)
    with pytest.raises(DomainError):
        ces_substitutes_linear_cdf(0.5, 0.5, 0.8)


@pytest.mark.parametrize("pref", [CES((0.3, 0.7), 1.8), Translog(0.3, 1.4),
                                  Mixture((0.5, 0.5), (CES((0.5, 0.5), 3.0), Linear((1, 4))))])
def test_round_trip_up_to_constant(pref):
    mu = mrs_distribution_from_substitutes(pref)
    meas = mu.to_measure()
    P = np.column_stack([np.geomspace(0.05, 20, 30), np.ones(30)])
    d = aggregate_continuous(meas, P) - log_expenditure(pref, P)
    assert d.max() - d.min() < 2e-3


def test_numeric_path_matches_closed_form():
    # a CES preference wrapped in a mixture goes through numeric inversion
    pref = Mixture((1.0,), (CES((0.4, 0.6), 2.0),))
    mu = mrs_distribution_from_substitutes(pref, grid=2000)
    exact = ces_substitutes_linear_cdf(0.4, 0.6, 2.0)
    u = (np.arange(2000) + 0.5) / 2000
    np.testing.assert_allclose(mu.t, exact.ppf_fn(u), rtol=1e-9)


def test_mrs_serialization_round_trip():
    mu = mrs_distribution_from_substitutes(Mixture((0.25, 0.75), (Linear((1, 0)), Linear((3, 1)))))
    back = MRSDistribution.from_dict(mu.to_dict())
    np.testing.assert_array_equal(back.t, mu.t)
    np.testing.assert_array_equal(back.w, mu.w)
    assert back.mass_inf == mu.mass_inf == pytest.approx(0.25)


# --- quantised approximation --------------------------------------------------------------------

def _max_share_gap(a, b):
    P = np.column_stack([np.geomspace(1e-3, 1e3, 4001), np.ones(4001)])
    return float(np.max(np.abs(expenditure_shares(a, P)[:, 0] - expenditure_shares(b, P)[:, 0])))


def test_cobb_douglas_approximation_is_exact():
    pop = linear_population_approximation(CobbDouglas((0.5, 0.5)), 0.5)
    assert pop.m == 2
    np.testing.assert_allclose(pop.budgets, [0.5, 0.5])
    assert _max_share_gap(aggregate_population(pop), CobbDouglas((0.5, 0.5))) == 0.0


def test_ces_approximation_quarter():
    pref = CES((0.5, 0.5), 2.0)
    pop = linear_population_approximation(pref, 0.25)
    assert pop.m <= 5
    assert _max_share_gap(aggregate_population(pop), pref) <= 0.25 + 1e-12


def test_linear_approximation_is_identity():
    pop = linear_population_approximation(Linear((3, 1)), 0.1)
    assert pop.m == 1 and pop.prefs[0] == Linear((3, 1))


@given(st.floats(0.05, 0.95), st.floats(1.1, 5.0), st.floats(0.03, 0.5))
def test_quantisation_bound(a1, sigma, eps):
    pref = CES((a1, 1 - a1), sigma)
    pop = linear_population_approximation(pref, eps)
    assert pop.m <= math.floor(1 / eps + 1e-12) + 1
    assert _max_share_gap(aggregate_population(pop), pref) <= eps + 1e-9


# --- Leontief densities and Stieltjes transforms ----------------------------------------------

def test_symmetric_density_formula():
    nu = ces_complements_leontief_density(0.5, 0.5, 0.5)
    z = np.array([0.01, 0.3, 1.0, 7.0, 300.0])
    np.testing.assert_allclose(nu.phi(z), 1 / (math.pi * np.sqrt(z) * (1 + z)), rtol=1e-13)


@pytest.mark.parametrize("sigma", [1 / 3, 1 / 2, 2 / 3])
@pytest.mark.parametrize("A", [0.5, 1.0, 2.0])
def test_density_formula_against_independent_expression(sigma, A):
    nu = ces_complements_density(A, sigma)
    z = np.geomspace(1e-3, 1e3, 13)
    np.testing.assert_allclose(nu.phi(z), [oracles.complements_density(x, A, sigma) for x in z], rtol=1e-12)


def test_density_integrates_to_one_adaptive():
    for sigma, A in ((1 / 3, 2.0), (0.5, 1.0), (2 / 3, 0.5)):
        assert oracles.density_integral(lambda z: 1.0, A, sigma) == pytest.approx(1.0, abs=1e-8)


def test_stieltjes_examples():
    nu = ces_complements_leontief_density(0.5, 0.5, 0.5)
    assert stieltjes_transform(nu, 1.0) == pytest.approx(0.5, abs=1e-10)
    assert stieltjes_transform(nu, 4.0) == pytest.approx(1 / 6, abs=1e-10)
    assert stieltjes_transform(point_mass(2.5), 3.0) == pytest.approx(1 / 5.5)
    nu3 = ces_complements_density(1.0, 1 / 3)
    assert stieltjes_transform(nu3, 1.0) == pytest.approx(0.5, abs=1e-10)


def test_stieltjes_is_ces_demand():
    a1, a2, sigma = 0.3, 0.7, 0.4
    nu = ces_complements_leontief_density(a1, a2, sigma)
    pref = CES((a1, a2), sigma)
    for lam in (0.2, 1.0, 3.5):
        # demand of the mixture of Leontief (1, z) consumers, up to the normalisation of z
        d = stieltjes_transform(nu, lam)
        s = expenditure_shares(pref, [lam, 1.0])[0]
        assert d * lam == pytest.approx(s, abs=1e-9)


def test_stieltjes_matches_adaptive_integration():
    for sigma, A, lam in ((1 / 3, 0.5, 0.1), (0.5, 2.0, 2.0), (2 / 3, 1.0, 10.0)):
        nu = ces_complements_density(A, sigma)
        assert stieltjes_transform(nu, lam) == pytest.approx(
            oracles.density_integral(lambda z: 1 / (lam + z), A, sigma), abs=1e-9)


def test_stieltjes_perron_recovers_density():
    A, sigma = 1.5, 0.4

    def f(lam):
        return 1.0 / (lam + A * lam**sigma)

    for z in (0.2, 1.0, 4.0):
        assert stieltjes_perron_density(f, z, eps=1e-9) == pytest.approx(
            oracles.complements_density(z, A, sigma), rel=1e-6)


def test_density_from_function_point():
    nu = density_from_function(lambda z: 1 / (math.pi * np.sqrt(z) * (1 + z)))
    assert nu.mass() == pytest.approx(1.0, abs=1e-6)
    assert stieltjes_transform(nu, 1.0, tol=1e-6) == pytest.approx(0.5, abs=1e-6)


def test_coarse_estimate_warns_when_too_loose():
    nu = density_from_function(lambda z: 1 / (math.pi * np.sqrt(z) * (1 + z)), panels=20, order=4)
    with pytest.warns(ConvergenceWarning):
        stieltjes_transform(nu, 1.0, tol=1e-12)


def test_ratio_density_serialization():
    nu = ces_complements_leontief_density(0.4, 0.6, 0.3)
    back = RatioDensity.from_dict(nu.to_dict())
    np.testing.assert_array_equal(back.nodes, nu.nodes)
    assert back.to_dict() == nu.to_dict()


def test_density_domain():
    with pytest.raises(DomainError):
        ces_complements_leontief_density(0.5, 0.5, 1.5)


# --- complete monotonicity ----------------------------------------------------------------------

def test_leontief_completely_monotone():
    rep = complete_monotonicity_check(Leontief((1, 1)), 0, [1.3, 0.7])
    assert rep.passed
    for c in rep.checks:
        k = c.order
        exact = (-1) ** k * math.factorial(k) / 2.0 ** (k + 1)
        assert c.value == pytest.approx(exact, rel=1e-4)


def test_ces_complements_completely_monotone():
    assert complete_monotonicity_check(CES((0.5, 0.5), 0.5), 0, [1, 1]).passed


def test_linear_near_kink_fails():
    rep = complete_monotonicity_check(Linear((1, 1)), 0, [1.0 + 1e-3, 1.0])
    assert not rep.passed


# --- ARUM sign conditions -----------------------------------------------------------------------

def test_e3_fails_second_order():
    alpha = 1.2
    rep = arum_sign_conditions_check(e3(alpha), [1, 1, 1], q_max=2)
    assert not rep.passed
    second = [c for c in rep.checks if len(c.wrt) == 2]
    for c in second:
        assert c.value == pytest.approx(-2 * (alpha - 1) / 27, abs=1e-6)
        assert not c.ok


@given(positive(3, 0.3, 3.0))
def test_e3_second_partial_closed_form(p):
    alpha = 1.2
    p = np.array(p)
    val, _ = mixed_log_partial(e3(alpha), 0, (1, 2), p)
    assert val == pytest.approx(-2 * (alpha - 1) * p.prod() / p.sum() ** 3, abs=1e-6)


def test_ces_substitutes_pass():
    rep = arum_sign_conditions_check(CES((1 / 3, 1 / 3, 1 / 3), 2.0), [1, 1, 1])
    assert rep.passed
    q2 = [c for c in rep.checks if len(c.wrt) == 2][0]
    assert q2.value == pytest.approx(2 / 27, abs=1e-6)


def test_leontief_fails_first_order():
    rep = arum_sign_conditions_check(Leontief((1, 2, 1)), [1, 1, 1], q_max=1)
    assert not rep.passed


@given(st.lists(positive(3, 0.2, 5), min_size=1, max_size=4), positive(3, 0.2, 5))
def test_linear_mixtures_pass(vs, p):
    comps = tuple(Linear(v) for v in vs)
    pref = Mixture(tuple(np.full(len(comps), 1 / len(comps))), comps)
    # keep away from kinks so central differences stay on one face
    ratios = np.array([np.array(v) / np.array(p) for v in vs])
    srt = np.sort(ratios, axis=1)
    if np.min(np.log(srt[:, -1] / srt[:, -2])) < 0.2:
        return
    assert arum_sign_conditions_check(pref, p, h=1e-2).passed


# --- Monte Carlo choice ---------------------------------------------------------------------------

def test_mc_symmetric():
    est = arum_choice_probabilities_mc(ShockSpec("gumbel", 1.0), [0, 0, 0], 200_000, seed=1)
    assert np.all(np.abs(est.probs - 1 / 3) <= 3 * est.stderr)


def test_mc_logit_two_goods():
    est = arum_choice_probabilities_mc(ShockSpec("gumbel", 1.0), [math.log(2), 0.0], 200_000, seed=2)
    assert np.all(np.abs(est.probs - [2 / 3, 1 / 3]) <= 3 * est.stderr)


def test_mc_is_deterministic_given_seed():
    a = arum_choice_probabilities_mc(ShockSpec(), [0.1, 0.2], 20_000, seed=5)
    b = arum_choice_probabilities_mc(ShockSpec(), [0.1, 0.2], 20_000, seed=5)
    np.testing.assert_array_equal(a.probs, b.probs)


def test_mc_requires_samples():
    with pytest.raises(ValueError):
        arum_choice_probabilities_mc(ShockSpec(), [0, 0], 100, seed=0)
