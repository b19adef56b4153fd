"""Risk-free term structure, discount factors and spread-adjusted borrowing rates.

All rates cross this module's boundary as fractions per year (0.03, not 3).
The parametric curve is a fit published in percent; it is divided by 100 on
evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

# (a, b, c, d) in  yield% = a * (b * ln(t) + c) ** d,  fit to the US Treasury curve of 2011-10-03
TREASURY_2011_PARAMS = (0.0034, 1.2892, 2.7061, 3.473272)

# No data behind the fit past 30y; 60y leaves headroom for lifetime sweeps.
PARAMETRIC_DOMAIN = (0.25, 60.0)

CurveKind = Literal["parametric", "flat", "tabulated"]
DiscountMode = Literal["legacy_equal_rates", "corrected_riskfree"]
RateMode = Literal["flat_at_horizon", "per_year_term_structure"]
LoanShape = Literal["annuity", "balloon"]

DISCOUNT_MODES = ("legacy_equal_rates", "corrected_riskfree")
RATE_MODES = ("flat_at_horizon", "per_year_term_structure")
LOAN_SHAPES = ("annuity", "balloon")


class CurveDomainError(ValueError):
    """Maturity outside the range a curve can be evaluated on."""


@dataclass(frozen=True)
class YieldCurve:
    """Risk-free spot curve.

    Use the :meth:`parametric`, :meth:`flat` and :meth:`tabulated`
    constructors rather than filling the fields by hand.
    """

    kind: CurveKind = "parametric"
    params: tuple[float, float, float, float] = TREASURY_2011_PARAMS
    flat_rate: float | None = None
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind == "parametric":
            if len(self.params) != 4 or not all(math.isfinite(p) for p in self.params):
                raise ValueError("parametric curve needs four finite coefficients (a, b, c, d)")
        elif self.kind == "flat":
            if self.flat_rate is None or not math.isfinite(self.flat_rate):
                raise ValueError("flat curve needs a finite flat_rate")
            if self.flat_rate < 0:
                raise ValueError(f"flat_rate must be >= 0, got {self.flat_rate}")
        elif self.kind == "tabulated":
            if len(self.table) < 1:
                raise ValueError("tabulated curve needs at least one (maturity, rate) point")
            mats = [m for m, _ in self.table]
            rates = [r for _, r in self.table]
            if not all(math.isfinite(v) for v in mats + rates):
                raise ValueError("tabulated curve points must be finite")
            if mats[0] <= 0:
                raise ValueError("tabulated maturities must be > 0")
            if any(b <= a for a, b in zip(mats, mats[1:])):
                raise ValueError("tabulated maturities must be strictly increasing")
            if min(rates) < 0:
                raise ValueError("tabulated rates must be >= 0")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def parametric(cls, params: Sequence[float] = TREASURY_2011_PARAMS) -> "YieldCurve":
        return cls(kind="parametric", params=tuple(float(p) for p in params))

    @classmethod
    def flat(cls, rate: float) -> "YieldCurve":
        return cls(kind="flat", flat_rate=float(rate))

    @classmethod
    def tabulated(cls, points: Sequence[Sequence[float]]) -> "YieldCurve":
        return cls(kind="tabulated", table=tuple((float(m), float(r)) for m, r in points))


def model_yield(curve: YieldCurve, t: float) -> float:
    """Risk-free spot rate (fraction per year) at maturity `t` years.

    Tabulated curves interpolate linearly in rate and clamp at both ends.
    """
    t = float(t)
    if curve.kind == "parametric":
        lo, hi = PARAMETRIC_DOMAIN
        if not lo <= t <= hi:
            raise CurveDomainError(f"maturity {t} outside parametric domain [{lo}, {hi}] years")
        a, b, c, d = curve.params
        base = b * math.log(t) + c
        if base < 0:
            raise CurveDomainError(f"fit base b*ln(t)+c is negative at t={t}")
        rate = a * base**d / 100.0
    else:
        if not t > 0:
            raise CurveDomainError(f"maturity must be > 0, got {t}")
        if curve.kind == "flat":
            rate = curve.flat_rate
        else:
            mats, rates = zip(*curve.table)
            rate = float(np.interp(t, mats, rates))
    if not math.isfinite(rate) or rate < 0:
        raise CurveDomainError(f"curve produced invalid rate {rate} at t={t}")
    return rate


def discount_factor(rate: float, n: float) -> float:
    """(1 + rate) ** -n."""
    if rate <= -1:
        raise ValueError(f"rate must be > -1, got {rate}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return (1.0 + rate) ** (-n)


@dataclass(frozen=True)
class FinancingTerms:
    """How the project is financed and which rate discounts its cash flows.

    spread
        Borrower credit spread r - r_0 (fraction/yr, >= 0).
    discount_mode
        ``legacy_equal_rates`` discounts at the borrowing rate (DR = r);
        ``corrected_riskfree`` discounts at the risk-free rate (DR = r_0).
    rate_mode
        ``per_year_term_structure`` reads a separate DR for every year n;
        ``flat_at_horizon`` reads the curve once at the project horizon.
    loan_shape
        ``annuity`` (level payments) or ``balloon`` (single repayment at N).
    financed_fraction
        Share of the project cost funded by the loan.
    """

    spread: float = 0.0
    discount_mode: DiscountMode = "corrected_riskfree"
    rate_mode: RateMode = "per_year_term_structure"
    loan_shape: LoanShape = "annuity"
    financed_fraction: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.spread) or self.spread < 0:
            raise ValueError(f"spread must be finite and >= 0, got {self.spread}")
        if self.discount_mode not in DISCOUNT_MODES:
            raise ValueError(f"discount_mode must be one of {DISCOUNT_MODES}")
        if self.rate_mode not in RATE_MODES:
            raise ValueError(f"rate_mode must be one of {RATE_MODES}")
        if self.loan_shape not in LOAN_SHAPES:
            raise ValueError(f"loan_shape must be one of {LOAN_SHAPES}")
        if not 0.0 <= self.financed_fraction <= 1.0:
            raise ValueError(f"financed_fraction must be in [0, 1], got {self.financed_fraction}")


def spot_rate_for_year(
    curve: YieldCurve, terms: FinancingTerms, n: int, horizon: int | None = None
) -> tuple[float, float]:
    """Return ``(dr, r)`` for cash flows in year `n`.

    In ``flat_at_horizon`` rate mode the curve is read at `horizon` (the
    project lifetime N) instead of `n`, so `horizon` is required there.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"year must be an integer >= 1, got {n}")
    if terms.rate_mode == "flat_at_horizon":
        if horizon is None:
            raise ValueError("flat_at_horizon rate mode needs the project horizon")
        t = horizon
    else:
        t = n
    r0 = model_yield(curve, t)
    r = r0 + terms.spread
    dr = r if terms.discount_mode == "legacy_equal_rates" else r0
    return dr, r
