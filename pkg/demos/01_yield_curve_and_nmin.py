"""
Treasury curve, cost factor and the optimal lifetime
====================================================

A plant financed by one zero-coupon bond pays ``PCI * (1 + r)**N`` at end
of life. Discounted at the risk-free rate ``DR`` and spread over lifetime
output, that gives the cost factor. We read ``DR`` at every horizon from
the 2011-10-03 US Treasury fit and add a fixed credit spread.
"""

# %%
# The fitted curve, as fractions per year
from pvlcoe import YieldCurve, cost_factor_curves, find_nmin, model_yield

curve = YieldCurve.parametric()
for years in (1, 2, 5, 10, 20, 30):
    print(f"{years:>3}y  {model_yield(curve, years):.4%}")

# %%
# Cost factor against lifetime for 5% and 8% spreads
table = cost_factor_curves(curve, spreads=(0.05, 0.08), sdr=0.006, n_values=range(1, 61))
for row in table.rows[::5]:
    print("N=%2d  yield=%.4f  cf(5%%)=%.4f  cf(8%%)=%.4f" % row)

# %%
# The curve bottoms out; a riskier borrower bottoms out earlier and higher
for spread in (0.05, 0.08):
    n, cost = find_nmin(curve, spread, 0.006, 60)
    print(f"spread {spread:.0%}: N_min = {n}, cost factor {cost:.4f}")

# %%
# Plot, if matplotlib is around
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    ax.plot(table.column("N"), table.column("cost_factor_spread5"), "r", label="spread 5%")
    ax.plot(table.column("N"), table.column("cost_factor_spread8"), "g", label="spread 8%")
    ax.set_xlabel("lifetime N, years")
    ax.set_ylabel("cost factor")
    ax.set_ylim(0, 0.6)
    ax2 = ax.twinx()
    ax2.plot(table.column("N"), [100 * y for y in table.column("yield")], "b", label="yield")
    ax2.set_ylabel("risk-free yield, %")
    ax.legend()
    fig.savefig("cost_factor_vs_lifetime.png", dpi=120)
    print("wrote cost_factor_vs_lifetime.png")
