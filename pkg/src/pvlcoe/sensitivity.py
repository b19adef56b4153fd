"""How the cost responds to its inputs.

Local elasticities, one-dimensional sweeps, the lifetime that minimises
the cost factor, and Monte Carlo Spearman rank correlations under either
the legacy (DR = r) or the corrected (DR = r_0) discounting convention.

Functions here take a scenario object (see :class:`pvlcoe.scenario_io.Scenario`)
with ``plant``, ``curve``, ``financing``, ``model``, ``denominator`` and
``module_replacement`` attributes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from scipy import stats

from .cost_models import cost_factor, lcic, lcoe_eq1, lcoe_zero_coupon
from .tables import Table
from .term_structure import YieldCurve, model_yield, spot_rate_for_year

PARAMETERS = ("lifetime_n", "sdr", "dr", "spread", "efficiency", "insolation", "pci")
SAMPLEABLE = ("sdr", "dr", "spread", "efficiency", "insolation", "pci")

# closed sampling domains; open bounds are nudged inward
PARAM_DOMAINS = {
    "sdr": (0.0, 0.99),
    "dr": (0.0, 1.0),
    "spread": (0.0, 1.0),
    "efficiency": (1e-6, 1.0),
    "insolation": (1e-6, math.inf),
    "pci": (1e-9, math.inf),
}

# relative cost = 1 here for the relative-cost curves
FIG2_NORMALIZATION = {"spread": 0.05, "sdr": 0.006, "dr": 0.03, "lifetime_n": 30}

MAX_SWEEP_POINTS = 100_000

Variant = Literal["legacy", "corrected"]


# -- scenario plumbing ------------------------------------------------------

def get_parameter(scenario, pid: str) -> float:
    plant = scenario.plant
    if pid == "lifetime_n":
        return plant.lifetime_n
    if pid in ("sdr", "efficiency", "insolation", "pci"):
        return getattr(plant, pid)
    if pid == "spread":
        return scenario.financing.spread
    if pid == "dr":
        return model_yield(scenario.curve, plant.lifetime_n)
    raise KeyError(f"unknown parameter {pid!r}; expected one of {PARAMETERS}")


def set_parameter(scenario, pid: str, value: float):
    """Copy of `scenario` with one parameter changed.

    Setting ``dr`` replaces the curve with a flat one at that rate; setting
    ``efficiency`` or ``insolation`` rescales the year-1 output.
    """
    plant = scenario.plant
    if pid == "lifetime_n":
        if float(value) != int(value):
            raise ValueError(f"lifetime_n must be an integer, got {value}")
        return replace(scenario, plant=replace(plant, lifetime_n=int(value)))
    if pid == "efficiency":
        return replace(scenario, plant=plant.rescaled(efficiency=value))
    if pid == "insolation":
        return replace(scenario, plant=plant.rescaled(insolation=value))
    if pid in ("sdr", "pci"):
        return replace(scenario, plant=replace(plant, **{pid: float(value)}))
    if pid == "spread":
        return replace(scenario, financing=replace(scenario.financing, spread=float(value)))
    if pid == "dr":
        return replace(scenario, curve=YieldCurve.flat(value))
    raise KeyError(f"unknown parameter {pid!r}; expected one of {PARAMETERS}")


def horizon_rates(scenario) -> tuple[float, float]:
    """(discount rate, borrowing rate) the scenario applies at its horizon."""
    n = scenario.plant.lifetime_n
    return spot_rate_for_year(scenario.curve, scenario.financing, n, horizon=n)


def evaluate(scenario) -> float:
    """Cost of `scenario` under its model (per kWh for eq1/eq3, currency for lcic)."""
    plant = scenario.plant
    if scenario.model == "eq3":
        dr, r = horizon_rates(scenario)
        return lcoe_zero_coupon(plant.pci, r, dr, plant.lifetime_n, plant.sdr, plant.initial_kwh)
    if scenario.model == "eq1":
        return lcoe_eq1(plant, scenario.curve, scenario.financing, scenario.denominator).lcoe
    if scenario.model == "lcic":
        spec = scenario.module_replacement
        if spec is None:
            raise ValueError("lcic model needs module_replacement")
        dr, _ = spot_rate_for_year(scenario.curve, scenario.financing, spec.horizon, horizon=spec.horizon)
        return lcic(spec, dr)
    raise ValueError(f"unknown model {scenario.model!r}")


def apply_variant(scenario, variant: Variant):
    """Switch a scenario to the legacy or corrected discounting convention."""
    if variant == "legacy":
        mode, denom = "legacy_equal_rates", "discounted_legacy"
    elif variant == "corrected":
        mode, denom = "corrected_riskfree", "physical_corrected"
    else:
        raise ValueError(f"variant must be 'legacy' or 'corrected', got {variant!r}")
    return replace(scenario, financing=replace(scenario.financing, discount_mode=mode), denominator=denom)


# -- local sensitivity ------------------------------------------------------

def elasticity(scenario, pid: str, rel_step: float = 1e-4) -> float:
    """d ln(cost) / d ln(parameter) by central differences."""
    if not 0 < rel_step <= 0.1:
        raise ValueError(f"rel_step must be in (0, 0.1], got {rel_step}")
    if pid == "lifetime_n":
        raise ValueError("lifetime_n is an integer and has no elasticity")
    p = get_parameter(scenario, pid)
    if p == 0:
        raise ValueError(f"{pid} is 0; a relative perturbation is undefined")
    base = evaluate(scenario)
    if base == 0:
        raise ZeroDivisionError("cost is 0 at the baseline")
    try:
        up = evaluate(set_parameter(scenario, pid, p * (1 + rel_step)))
        down = evaluate(set_parameter(scenario, pid, p * (1 - rel_step)))
    except ValueError as exc:
        raise ValueError(f"perturbing {pid} by ±{rel_step:g} leaves its valid domain: {exc}") from exc
    return (up - down) / (2 * rel_step * base)


@dataclass(frozen=True)
class SweepSpec:
    """Grid for a one-parameter sweep.

    ``normalization`` maps parameter ids to values; the cost there defines
    relative cost 1. ``None`` normalises to the unmodified baseline.
    """

    parameter: str
    values: tuple[float, ...]
    normalization: dict[str, float] | None = None

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"sweep parameter must be one of {PARAMETERS}, got {self.parameter!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("sweep range is empty")
        if any(not math.isfinite(v) for v in self.values):
            raise ValueError("sweep values must be finite")
        if self.normalization is not None:
            bad = set(self.normalization) - set(PARAMETERS)
            if bad:
                raise ValueError(f"unknown normalization parameters {sorted(bad)}")

    @classmethod
    def from_range(cls, parameter, start, stop, step, normalization=None) -> "SweepSpec":
        """Inclusive grid start, start+step, ... up to stop."""
        if step <= 0:
            raise ValueError("step must be > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError("sweep range is empty")
        if count > MAX_SWEEP_POINTS:
            raise ValueError(f"sweep has {count} points; limit is {MAX_SWEEP_POINTS}")
        return cls(parameter, tuple(start + i * step for i in range(count)), normalization)


def _with_parameters(scenario, values):
    # N first so a dr set afterwards is not re-read at another horizon
    for pid in sorted(values, key=lambda p: p != "lifetime_n"):
        scenario = set_parameter(scenario, pid, values[pid])
    return scenario


def sweep(spec: SweepSpec, scenario) -> Table:
    """Evaluate the cost over the grid.

    Columns: parameter value, cost, relative cost, error. Points that fail
    to evaluate keep their row with NaN costs and the error message.
    """
    ref_scenario = scenario if spec.normalization is None else _with_parameters(scenario, spec.normalization)
    try:
        ref = evaluate(ref_scenario)
    except (ValueError, ArithmeticError) as exc:
        raise ValueError(f"normalization point cannot be evaluated: {exc}") from exc
    if ref == 0:
        raise ValueError("cost at the normalization point is 0")
    base = ref_scenario if spec.normalization is not None else scenario
    table = Table((spec.parameter, "cost", "relative_cost", "error"))
    for v in spec.values:
        try:
            cost = evaluate(set_parameter(base, spec.parameter, v))
            table.append((v, cost, cost / ref, ""))
        except (ValueError, ArithmeticError) as exc:
            table.append((v, math.nan, math.nan, str(exc)))
    return table


def find_nmin(
    curve: YieldCurve, spread: float, sdr: float, n_max: int, pci: float = 1.0, initial_kwh: float = 1.0
) -> tuple[int, float]:
    """Lifetime N in 1..n_max minimising the zero-coupon cost, DR read at N.

    Exhaustive scan; the lowest N wins ties. With the default unit `pci`
    and `initial_kwh` the cost is the cost factor.
    """
    if int(n_max) != n_max or n_max < 2:
        raise ValueError(f"n_max must be an integer >= 2, got {n_max}")
    best_n, best = 0, math.inf
    for n in range(1, int(n_max) + 1):
        dr = model_yield(curve, n)
        c = lcoe_zero_coupon(pci, dr + spread, dr, n, sdr, initial_kwh)
        if c < best:
            best_n, best = n, c
    return best_n, best


def cost_factor_curves(
    curve: YieldCurve,
    spreads: Sequence[float] = (0.05, 0.08),
    sdr: float = 0.006,
    n_values: Sequence[int] = range(1, 61),
) -> Table:
    """Risk-free yield and cost factor against lifetime for a few spreads."""
    cols = ["N", "yield"] + [f"cost_factor_spread{s * 100:g}" for s in spreads]
    table = Table(tuple(cols))
    for n in n_values:
        y = model_yield(curve, n)
        table.append((int(n), y, *(cost_factor(y + s, y, int(n), sdr) for s in spreads)))
    return table


# -- rank correlation -------------------------------------------------------

def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"inputs must be 1-D and equal length, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValueError("rank correlation is undefined for constant input")
    rx = stats.rankdata(x) - (len(x) + 1) / 2
    ry = stats.rankdata(y) - (len(y) + 1) / 2
    rho = float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    return min(1.0, max(-1.0, rho))


@dataclass(frozen=True)
class DistributionSpec:
    """Sampling distribution for one parameter.

    shape ``normal`` uses (mean, sd), ``uniform`` uses (lo, hi), ``point``
    uses value. Normal draws are truncated to ``bounds``, which default to
    the parameter's valid domain and may only narrow it.
    """

    parameter: str
    shape: Literal["normal", "uniform", "point"]
    mean: float | None = None
    sd: float | None = None
    lo: float | None = None
    hi: float | None = None
    value: float | None = None
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        if self.parameter not in SAMPLEABLE:
            raise ValueError(f"cannot sample {self.parameter!r}; expected one of {SAMPLEABLE}")
        dlo, dhi = PARAM_DOMAINS[self.parameter]
        if self.bounds is not None:
            if len(self.bounds) != 2:
                raise ValueError("bounds must be a (lo, hi) pair")
            object.__setattr__(self, "bounds", (float(self.bounds[0]), float(self.bounds[1])))
        lo, hi = self.effective_bounds
        if not (dlo <= lo < hi <= dhi):
            raise ValueError(f"bounds for {self.parameter} must satisfy {dlo} <= lo < hi <= {dhi}")
        if self.shape == "normal":
            if self.mean is None or self.sd is None or not math.isfinite(self.mean) or not math.isfinite(self.sd):
                raise ValueError("normal distribution needs finite mean and sd")
            if self.sd < 0:
                raise ValueError(f"sd must be >= 0, got {self.sd}")
            if self.sd == 0 and not lo <= self.mean <= hi:
                raise ValueError(f"mean {self.mean} outside bounds {(lo, hi)}")
        elif self.shape == "uniform":
            if self.lo is None or self.hi is None or not (lo <= self.lo < self.hi <= hi):
                raise ValueError(f"uniform range must satisfy {lo} <= lo < hi <= {hi}")
        elif self.shape == "point":
            if self.value is None or not lo <= self.value <= hi:
                raise ValueError(f"point value must lie in {(lo, hi)}")
        else:
            raise ValueError(f"unknown distribution shape {self.shape!r}")

    @property
    def effective_bounds(self) -> tuple[float, float]:
        return self.bounds if self.bounds is not None else PARAM_DOMAINS[self.parameter]

    @property
    def is_point(self) -> bool:
        return self.shape == "point" or (self.shape == "normal" and self.sd == 0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lo, hi = self.effective_bounds
        if self.shape == "point":
            return np.full(size, float(self.value))
        if self.shape == "uniform":
            return rng.uniform(self.lo, self.hi, size)
        if self.sd == 0:
            return np.full(size, float(self.mean))
        a, b = (lo - self.mean) / self.sd, (hi - self.mean) / self.sd
        return stats.truncnorm.rvs(a, b, loc=self.mean, scale=self.sd, size=size, random_state=rng)


def default_distributions() -> list[DistributionSpec]:
    """Normal spreads around the relative-cost baseline (DR 3%, spread 5%, SDR 0.6%).

    Efficiency uses sd 0.8 points around 16%; insolation sd is 10% of 1800.
    """
    return [
        DistributionSpec("dr", "normal", mean=0.03, sd=0.005),
        DistributionSpec("spread", "normal", mean=0.05, sd=0.01),
        DistributionSpec("sdr", "normal", mean=0.006, sd=0.002),
        DistributionSpec("efficiency", "normal", mean=0.16, sd=0.008),
        DistributionSpec("insolation", "normal", mean=1800.0, sd=180.0),
    ]


@dataclass(frozen=True)
class SensitivityReport:
    """Per-parameter sensitivities.

    ``entries`` pairs parameter ids with values; ``None`` marks a parameter
    that did not vary. Rank-correlation reports also carry the derived
    ``discount_rate`` and ``borrowing_rate`` actually applied at the horizon.
    """

    mode: Literal["elasticity", "rank_correlation"]
    entries: tuple[tuple[str, float | None], ...]
    sample_count: int = 0
    seed: int | None = None
    variant: str = ""
    baseline: dict = field(default_factory=dict)

    def __getitem__(self, pid: str) -> float | None:
        for k, v in self.entries:
            if k == pid:
                return v
        raise KeyError(pid)

    def ranking(self) -> list[tuple[str, float]]:
        """Non-degenerate entries by decreasing magnitude."""
        return sorted(((k, v) for k, v in self.entries if v is not None), key=lambda kv: -abs(kv[1]))

    def to_table(self) -> Table:
        return Table(("parameter", "value"), [(k, v) for k, v in self.entries])


def elasticity_report(scenario, pids: Sequence[str], rel_step: float = 1e-4) -> SensitivityReport:
    entries = tuple((pid, elasticity(scenario, pid, rel_step)) for pid in pids)
    return SensitivityReport("elasticity", entries, baseline={pid: get_parameter(scenario, pid) for pid in pids})


def _apply_sample(scenario, values):
    # one replace per component; same result as chained set_parameter calls
    plant, financing, curve = scenario.plant, scenario.financing, scenario.curve
    kw = {k: float(values[k]) for k in ("sdr", "pci") if k in values}
    if "efficiency" in values or "insolation" in values:
        plant = plant.rescaled(values.get("efficiency"), values.get("insolation"))
    if kw:
        plant = replace(plant, **kw)
    if "spread" in values:
        financing = replace(financing, spread=float(values["spread"]))
    if "dr" in values:
        curve = YieldCurve.flat(values["dr"])
    return replace(scenario, plant=plant, financing=financing, curve=curve)


def _evaluate_chunk(args):
    scenario, names, columns = args
    costs = np.empty(len(columns[0]) if columns else 0)
    rates = np.empty((len(costs), 2))
    for i in range(len(costs)):
        s = _apply_sample(scenario, {pid: col[i] for pid, col in zip(names, columns)})
        costs[i] = evaluate(s)
        rates[i] = horizon_rates(s)
    return costs, rates


def monte_carlo_rank_sensitivity(
    distributions: Sequence[DistributionSpec],
    scenario,
    variant: Variant,
    sample_count: int,
    seed: int,
    workers: int = 1,
) -> SensitivityReport:
    """Spearman correlation of each sampled input with the cost.

    Draws come from one ``numpy.random.default_rng(seed)`` stream, one
    distribution at a time in list order, so a report depends only on
    (distributions, scenario, variant, sample_count, seed). With
    ``workers > 1`` samples are evaluated in ordered chunks across
    processes; the result is identical to the serial run.
    """
    if sample_count < 100:
        raise ValueError(f"sample_count must be >= 100, got {sample_count}")
    names = [d.parameter for d in distributions]
    if len(set(names)) != len(names):
        raise ValueError("each parameter may have only one distribution")
    scenario = apply_variant(scenario, variant)
    rng = np.random.default_rng(seed)
    samples = [d.sample(rng, sample_count) for d in distributions]

    try:
        if workers > 1:
            cuts = np.linspace(0, sample_count, workers + 1).astype(int)
            chunks = [(scenario, names, [col[a:b] for col in samples]) for a, b in zip(cuts, cuts[1:])]
            with ProcessPoolExecutor(workers) as pool:
                parts = list(pool.map(_evaluate_chunk, chunks))
            costs = np.concatenate([p[0] for p in parts])
            rates = np.concatenate([p[1] for p in parts])
        else:
            costs, rates = _evaluate_chunk((scenario, names, samples))
    except (ValueError, ArithmeticError) as exc:
        raise ValueError(f"sample evaluation failed: {exc}") from exc
    if not np.all(np.isfinite(costs)):
        raise ValueError("sample evaluation produced non-finite cost")
    if np.all(costs == costs[0]):
        raise ValueError("cost is constant across samples; rank correlation undefined")

    entries = []
    for d, col in zip(distributions, samples):
        entries.append((d.parameter, None if np.all(col == col[0]) else spearman_rho(col, costs)))
    for j, name in enumerate(("discount_rate", "borrowing_rate")):
        col = rates[:, j]
        entries.append((name, None if np.all(col == col[0]) else spearman_rho(col, costs)))
    baseline = {pid: get_parameter(scenario, pid) for pid in ("lifetime_n", "sdr", "spread", "efficiency", "insolation", "pci")}
    baseline["model"] = scenario.model
    return SensitivityReport("rank_correlation", tuple(entries), sample_count, seed, variant, baseline)
