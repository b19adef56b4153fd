"""
Relative cost against degradation, discount rate and credit spread
==================================================================

All curves are normalised to spread 5%, SDR 0.6%, DR 3%, N 30.
"""

# %%
import numpy as np

from pvlcoe import FIG2_NORMALIZATION, SweepSpec, load_fixture, sweep

baseline = load_fixture("fig2_baseline")

grids = {
    "sdr": np.linspace(0.0, 0.06, 13),
    "dr": np.linspace(0.01, 0.06, 11),
    "spread": np.linspace(0.0, 0.08, 17),
}
tables = {pid: sweep(SweepSpec(pid, tuple(grid), FIG2_NORMALIZATION), baseline) for pid, grid in grids.items()}

for pid, table in tables.items():
    print(f"\n{pid}")
    for value, _, rel, _ in table.rows:
        print(f"  {value:6.3f}  {rel:6.3f}")

# %%
# Degradation doubles the cost only when SDR reaches about 5.6%/yr, at
# which point about 18% of the first-year output is left after 30 years.
rel = sweep(SweepSpec("sdr", (0.006, 0.056), FIG2_NORMALIZATION), baseline).column("relative_cost")
print("SDR 0.6% -> 5.6%:", rel, " remaining output:", (1 - 0.056) ** 30)

# %%
# The borrower's spread dominates: four times cheaper at zero spread,
# twice as expensive at 7.5%.
rel = sweep(SweepSpec("spread", (0.0, 0.05, 0.075), FIG2_NORMALIZATION), baseline).column("relative_cost")
print("spread 0 / 5% / 7.5%:", [round(x, 3) for x in rel])

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for (pid, table), colour in zip(tables.items(), "brg"):
        ax.plot([100 * v for v in table.column(pid)], table.column("relative_cost"), colour, label=pid)
    ax.set_xlabel("rate, %")
    ax.set_ylabel("relative cost")
    ax.legend()
    fig.savefig("relative_cost.png", dpi=120)
    print("wrote relative_cost.png")
