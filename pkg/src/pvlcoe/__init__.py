"""Levelized cost of PV energy with separate borrowing and discount rates."""
from .cost_models import (
    AmortizationSchedule,
    DepreciationSchedule,
    LcoeResult,
    ModuleReplacementSpec,
    PlantSpec,
    amortization_schedule,
    balloon_schedule,
    cost_factor,
    degraded_output_sum,
    depreciation_schedule,
    lcic,
    lcoe_eq1,
    lcoe_zero_coupon,
)
from .scenario_io import (
    Scenario,
    ScenarioError,
    ScenarioParseError,
    ScenarioValidationError,
    dump_scenario,
    emit_table,
    load_fixture,
    load_scenario,
    load_scenario_file,
)
from .sensitivity import (
    FIG2_NORMALIZATION,
    DistributionSpec,
    SensitivityReport,
    SweepSpec,
    cost_factor_curves,
    default_distributions,
    elasticity,
    evaluate,
    find_nmin,
    monte_carlo_rank_sensitivity,
    spearman_rho,
    sweep,
)
from .tables import Table
from .term_structure import (
    TREASURY_2011_PARAMS,
    CurveDomainError,
    FinancingTerms,
    YieldCurve,
    discount_factor,
    model_yield,
    spot_rate_for_year,
)

__version__ = "0.1.0"
