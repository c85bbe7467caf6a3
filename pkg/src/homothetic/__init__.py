"""Homothetic preferences through log-expenditure functions.

Aggregation, decomposition into elementary consumers, Fisher-market
equilibria and robust welfare ranges.
"""

from .kernels import BACKEND
from .prefcore import (
    CES,
    Agent,
    CobbDouglas,
    ConvergenceWarning,
    DemandResult,
    DimensionError,
    DomainError,
    Leontief,
    Linear,
    Mixture,
    PiecewiseLinearE,
    Population,
    Preference,
    Translog,
    TwoGoodQ,
    demand,
    dual_utility_numeric,
    expenditure_shares,
    log_expenditure,
    preference_distance,
    preference_from_Q,
    utility,
)
from .aggregate import (
    QuadratureMeasure,
    aggregate_continuous,
    aggregate_population,
    contour_sample,
    eisenberg_gale_primal,
)
from .fisher import (
    EquilibriumResult,
    approx_equilibrium_two_goods,
    solve_equilibrium,
    solve_equilibrium_finitely_generated,
    verify_epsilon_equilibrium,
)
from .welfare import (
    PriceChange,
    WelfareRange,
    population_welfare,
    robust_range_parametric,
    robust_range_substitutes_ev,
    small_change_range,
    welfare_measure,
)

__version__ = "0.1.0"
