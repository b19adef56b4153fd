"""
Cash-flow LCOE with loan, tax and residual value
================================================
"""

# %%
from pvlcoe import FinancingTerms, PlantSpec, YieldCurve, amortization_schedule, lcoe_eq1

plant = PlantSpec(pci=10_000.0, initial_kwh=2880.0, sdr=0.006, lifetime_n=30, ao=50.0, tr=0.3, rv=500.0)
curve = YieldCurve.parametric()

# %%
# Same plant and loan, four conventions
for mode in ("legacy_equal_rates", "corrected_riskfree"):
    for denominator in ("discounted_legacy", "physical_corrected"):
        res = lcoe_eq1(plant, curve, FinancingTerms(0.05, mode, financed_fraction=0.8), denominator)
        print(f"{mode:20s} {denominator:19s} LCOE = {res.lcoe:.4f} /kWh")

# %%
# Where the money goes (corrected convention)
res = lcoe_eq1(plant, curve, FinancingTerms(0.05, financed_fraction=0.8))
for name, value in res.components.items():
    print(f"  {name:16s} {value:12.2f}")
print(f"  {'numerator':16s} {res.numerator:12.2f}")
print(f"  lifetime output  {res.denominator_kwh:12.0f} kWh")

# %%
# The loan itself
loan = amortization_schedule(8000.0, 0.0806, 30)
print("level payment:", round(loan.payment[0], 2), " total interest:", round(loan.interest.sum(), 2))
