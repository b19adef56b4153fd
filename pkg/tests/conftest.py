import pytest

from pvlcoe import FinancingTerms, PlantSpec, Scenario, YieldCurve


@pytest.fixture
def fig2_scenario():
    """Zero-coupon plant at spread 5%, SDR 0.6%, DR 3%, N 30 with unit cost and output."""
    return Scenario(
        plant=PlantSpec(pci=1.0, initial_kwh=1.0, sdr=0.006, lifetime_n=30, degradation_exponent="n"),
        curve=YieldCurve.flat(0.03),
        financing=FinancingTerms(spread=0.05, rate_mode="flat_at_horizon", loan_shape="balloon"),
        model="eq3",
    )


@pytest.fixture
def eq1_scenario():
    return Scenario(
        plant=PlantSpec(pci=10_000.0, initial_kwh=2880.0, sdr=0.006, lifetime_n=30, ao=50.0, tr=0.3, rv=500.0),
        curve=YieldCurve.flat(0.03),
        financing=FinancingTerms(spread=0.05),
        model="eq1",
    )


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
