"""
Rank-correlation sensitivity: legacy versus corrected discounting
=================================================================

Legacy: the borrowing rate also discounts costs and output.
Corrected: costs are discounted at the risk-free rate and output is
counted in physical kWh.
"""

# %%
from pvlcoe import load_fixture, monte_carlo_rank_sensitivity

scenario = load_fixture("darling_mc")
for d in scenario.distributions:
    print(d)

# %%
for variant in ("legacy", "corrected"):
    report = monte_carlo_rank_sensitivity(scenario.distributions, scenario, variant, sample_count=10_000, seed=1)
    print(f"\n{variant}")
    for pid, rho in report.ranking():
        print(f"  {pid:15s} {rho:+.3f}")

# %%
# Under the legacy convention the rate ranks above efficiency. Once the
# risk-free rate discounts and output is not discounted, efficiency
# outranks the discount rate; what remains of the rate effect sits in the
# borrower's spread.
