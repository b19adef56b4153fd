"""Life-cycle cost equations for PV plants.

Four models live here:

* :func:`lcoe_eq1` -- the full cash-flow LCOE (equity, tax shield, loan
  payments, outlays, residual value) over a discounted or a physical
  output denominator.
* :func:`lcic` -- present cost of repeated module purchases with a residual
  credit for energy left in the last module.
* :func:`lcoe_zero_coupon` -- LCOE of a plant financed by a single
  zero-coupon bond due at end of life.
* :func:`cost_factor` -- the zero-coupon LCOE per unit project cost per
  unit year-1 output.

Degradation conventions: the cash-flow model weights year n output by
``(1 - sdr) ** (n - 1)``; the zero-coupon model and cost factor use
``(1 - sdr) ** n``. Both are available through `degraded_output_sum`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .term_structure import FinancingTerms, YieldCurve, discount_factor, spot_rate_for_year

DegradationExponent = Literal["n_minus_one", "n"]
Denominator = Literal["discounted_legacy", "physical_corrected"]

DEGRADATION_EXPONENTS = ("n_minus_one", "n")
MAX_LIFETIME = 1000
DENOMINATORS = ("discounted_legacy", "physical_corrected")


@dataclass(frozen=True)
class PlantSpec:
    """Physical and accounting description of a PV installation.

    ``initial_kwh`` is the year-1 output and is taken to be proportional to
    both ``efficiency`` and ``insolation``; use :meth:`rescaled` to change
    either one so that the output follows. Lifetimes are capped at
    ``MAX_LIFETIME`` years.
    """

    pci: float
    initial_kwh: float
    sdr: float = 0.006
    lifetime_n: int = 30
    efficiency: float = 0.16
    insolation: float = 1800.0  # kWh/m^2/yr
    ao: float = 0.0
    tr: float = 0.0
    rv: float = 0.0
    degradation_exponent: DegradationExponent = "n_minus_one"

    def __post_init__(self):
        for name in ("pci", "initial_kwh", "sdr", "efficiency", "insolation", "ao", "tr", "rv"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.pci <= 0:
            raise ValueError(f"pci must be > 0, got {self.pci}")
        if self.initial_kwh <= 0:
            raise ValueError(f"initial_kwh must be > 0, got {self.initial_kwh}")
        if not 0 <= self.sdr < 1:
            raise ValueError(f"sdr must be in [0, 1), got {self.sdr}")
        if int(self.lifetime_n) != self.lifetime_n or not 1 <= self.lifetime_n <= MAX_LIFETIME:
            raise ValueError(f"lifetime_n must be an integer in [1, {MAX_LIFETIME}], got {self.lifetime_n}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")
        if self.insolation <= 0:
            raise ValueError(f"insolation must be > 0, got {self.insolation}")
        if self.ao < 0:
            raise ValueError(f"ao must be >= 0, got {self.ao}")
        if not 0 <= self.tr < 1:
            raise ValueError(f"tr must be in [0, 1), got {self.tr}")
        if self.rv < 0:
            raise ValueError(f"rv must be >= 0, got {self.rv}")
        if self.degradation_exponent not in DEGRADATION_EXPONENTS:
            raise ValueError(f"degradation_exponent must be one of {DEGRADATION_EXPONENTS}")

    def rescaled(self, efficiency: float | None = None, insolation: float | None = None) -> "PlantSpec":
        """Copy with new efficiency and/or insolation, scaling initial_kwh to match."""
        eta = self.efficiency if efficiency is None else efficiency
        s = self.insolation if insolation is None else insolation
        kwh = self.initial_kwh * (eta / self.efficiency) * (s / self.insolation)
        return replace(self, efficiency=eta, insolation=s, initial_kwh=kwh)


@dataclass(frozen=True)
class AmortizationSchedule:
    """Year-by-year loan cash flows. Arrays are indexed by year - 1."""

    principal: float
    rate: float
    payment: np.ndarray
    interest: np.ndarray
    principal_repaid: np.ndarray
    balance: np.ndarray

    @property
    def years(self) -> np.ndarray:
        return np.arange(1, len(self.payment) + 1)


@dataclass(frozen=True)
class DepreciationSchedule:
    dep: np.ndarray
    method: str = "straight_line"


@dataclass(frozen=True)
class ModuleReplacementSpec:
    c_bom: float
    module_life: int
    energy_fraction_remaining: float = 0.0
    horizon: int = 25

    def __post_init__(self):
        if not math.isfinite(self.c_bom) or self.c_bom < 0:
            raise ValueError(f"c_bom must be finite and >= 0, got {self.c_bom}")
        if int(self.module_life) != self.module_life or self.module_life < 1:
            raise ValueError(f"module_life must be an integer >= 1, got {self.module_life}")
        if not 0 <= self.energy_fraction_remaining <= 1:
            raise ValueError(
                f"energy_fraction_remaining must be in [0, 1], got {self.energy_fraction_remaining}"
            )
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be an integer >= 1, got {self.horizon}")


@dataclass(frozen=True)
class LcoeResult:
    """LCOE with the pieces it was built from.

    ``components`` holds signed present values that add up to ``numerator``
    in insertion order; the tax shield and residual credit are negative.
    """

    lcoe: float
    numerator: float
    denominator_kwh: float
    components: dict[str, float] = field(default_factory=dict)
    discount_mode: str = ""
    rate_mode: str = ""
    denominator: str = ""
    loan_shape: str = ""


def _check_rate(name, rate):
    if not rate > -1:
        raise ValueError(f"{name} must be > -1, got {rate}")


def amortization_schedule(principal: float, r: float, n: int) -> AmortizationSchedule:
    """Level-payment annuity repaying `principal` over `n` years at rate `r`."""
    if not principal > 0:
        raise ValueError(f"principal must be > 0, got {principal}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    n = int(n)
    lp = principal / n if r == 0 else principal * r / -math.expm1(-n * math.log1p(r))
    payment = np.full(n, lp)
    interest = np.empty(n)
    repaid = np.empty(n)
    balance = np.empty(n)
    bal = principal
    for k in range(n):
        interest[k] = r * bal
        repaid[k] = lp - interest[k]
        bal -= repaid[k]
        balance[k] = bal
    # absorb float drift into the last instalment
    repaid[-1] += balance[-1]
    payment[-1] = interest[-1] + repaid[-1]
    balance[-1] = 0.0
    return AmortizationSchedule(principal, r, payment, interest, repaid, balance)


def balloon_schedule(principal: float, r: float, n: int) -> AmortizationSchedule:
    """Zero-coupon loan: interest accretes and everything is repaid in year `n`.

    Accrued interest shows up as negative ``principal_repaid`` in the years
    before maturity, so ``payment == interest + principal_repaid`` holds
    every year.
    """
    if not principal > 0:
        raise ValueError(f"principal must be > 0, got {principal}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    n = int(n)
    bal = principal * (1.0 + r) ** np.arange(n + 1)
    interest = r * bal[:-1]
    payment = np.zeros(n)
    payment[-1] = bal[-1]
    repaid = payment - interest
    balance = bal[1:].copy()
    balance[-1] = 0.0
    return AmortizationSchedule(principal, r, payment, interest, repaid, balance)


def depreciation_schedule(pci: float, rv: float, n: int) -> DepreciationSchedule:
    """Straight-line depreciation of ``pci - rv`` over `n` years."""
    if rv < 0 or rv > pci:
        raise ValueError(f"need pci >= rv >= 0, got pci={pci}, rv={rv}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    return DepreciationSchedule(np.full(int(n), (pci - rv) / n))


def _degradation_weights(sdr, n, exponent):
    k = np.arange(1, int(n) + 1)
    if exponent == "n_minus_one":
        k = k - 1
    elif exponent != "n":
        raise ValueError(f"exponent must be one of {DEGRADATION_EXPONENTS}")
    return (1.0 - sdr) ** k


def degraded_output_sum(sdr: float, n: int, exponent: DegradationExponent = "n") -> float:
    """Lifetime output in units of year-1 output.

    ``sum((1 - sdr) ** (k - 1))`` or ``sum((1 - sdr) ** k)`` for k = 1..n,
    depending on `exponent`.
    """
    if not 0 <= sdr < 1:
        raise ValueError(f"sdr must be in [0, 1), got {sdr}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    return float(np.sum(_degradation_weights(sdr, n, exponent)))


def cost_factor(r: float, dr: float, n: int, sdr: float) -> float:
    """Zero-coupon LCOE per unit project cost per unit year-1 output.

    ``(1 + r)**n / ((1 + dr)**n * sum_{k=1..n} (1 - sdr)**k)``
    """
    _check_rate("r", r)
    _check_rate("dr", dr)
    growth = ((1.0 + r) / (1.0 + dr)) ** n
    return growth / degraded_output_sum(sdr, n, "n")


def lcoe_zero_coupon(
    pci: float, r: float, dr: float, n: int, sdr: float, initial_kwh: float
) -> float:
    """LCOE of a plant paid for with a zero-coupon bond at `r` due in `n` years.

    The repayment ``pci * (1 + r)**n`` is brought to present value at `dr`
    and spread over the lifetime physical output.
    """
    if not pci > 0:
        raise ValueError(f"pci must be > 0, got {pci}")
    if not initial_kwh > 0:
        raise ValueError(f"initial_kwh must be > 0, got {initial_kwh}")
    return pci * cost_factor(r, dr, n, sdr) / initial_kwh


def lcic(spec: ModuleReplacementSpec, dr: float) -> float:
    """Present cost of module purchases at years 0, L, 2L, ... up to int(N/L)*L,
    less the discounted value of the energy fraction left at year N.

    When L divides N a fresh module is bought in year N itself; this is kept.
    """
    _check_rate("dr", dr)
    n, lm = spec.horizon, spec.module_life
    k = np.arange(n // lm + 1)
    purchases = float(np.sum(spec.c_bom / (1.0 + dr) ** (k * lm)))
    return purchases - spec.c_bom * spec.energy_fraction_remaining / (1.0 + dr) ** n


def lcoe_eq1(
    plant: PlantSpec,
    curve: YieldCurve,
    terms: FinancingTerms,
    denominator: Denominator = "physical_corrected",
    financed_fraction: float | None = None,
) -> LcoeResult:
    """Cash-flow LCOE of a plant.

    The numerator is::

        equity - sum (DEP + I) * TR * df(n) + sum LP * df(n)
               + sum AO * (1 - TR) * df(n) - RV * df(N)

    with df(n) built from the discount rate `terms` assigns to year n. The
    loan runs over the whole lifetime at the borrowing rate for an N-year
    maturity. ``discounted_legacy`` discounts the output in the denominator
    too; ``physical_corrected`` counts kWh as produced.

    `financed_fraction` overrides ``terms.financed_fraction`` when given.
    The residual value is discounted at DR in both modes.
    """
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}")
    ff = terms.financed_fraction if financed_fraction is None else financed_fraction
    if not 0.0 <= ff <= 1.0:
        raise ValueError(f"financed_fraction must be in [0, 1], got {ff}")

    n = int(plant.lifetime_n)
    if terms.rate_mode == "flat_at_horizon" or curve.kind == "flat":
        dr = np.full(n, spot_rate_for_year(curve, terms, n, horizon=n)[0])
    else:
        dr = np.array([spot_rate_for_year(curve, terms, k, horizon=n)[0] for k in range(1, n + 1)])
    years = np.arange(1, n + 1)
    df = (1.0 + dr) ** (-years)
    _, r_loan = spot_rate_for_year(curve, terms, n, horizon=n)

    principal = ff * plant.pci
    if principal > 0:
        build = amortization_schedule if terms.loan_shape == "annuity" else balloon_schedule
        loan = build(principal, r_loan, n)
        lp, interest = loan.payment, loan.interest
    else:
        lp = interest = np.zeros(n)
    dep = depreciation_schedule(plant.pci, plant.rv, n).dep

    components = {
        "capital": plant.pci - principal,
        "tax_shield": 0.0 - float(np.sum((dep + interest) * plant.tr * df)),
        "loan_payments": float(np.sum(lp * df)),
        "outlays": float(np.sum(plant.ao * (1.0 - plant.tr) * df)),
        "residual_credit": 0.0 - plant.rv * float(df[-1]),
    }
    numerator = 0.0
    for v in components.values():
        numerator += v

    weights = _degradation_weights(plant.sdr, n, plant.degradation_exponent)
    if denominator == "discounted_legacy":
        weights = weights * df
    denom = plant.initial_kwh * float(np.sum(weights))
    if not denom > 0:
        raise ArithmeticError("lifetime output underflowed to zero")

    return LcoeResult(
        lcoe=numerator / denom,
        numerator=numerator,
        denominator_kwh=denom,
        components=components,
        discount_mode=terms.discount_mode,
        rate_mode=terms.rate_mode,
        denominator=denominator,
        loan_shape=terms.loan_shape,
    )
