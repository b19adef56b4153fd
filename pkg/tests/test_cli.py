import json
import subprocess
import sys

import pytest

from pvlcoe.cli import EXIT_EVAL, EXIT_USAGE, build_parser, main
from pvlcoe.scenario_io import fixture_text, read_csv_table

SUBCOMMANDS = ("compute", "cost-factor", "curve", "sweep", "nmin", "sensitivity", "mc")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cost_factor_percent_flags(capsys):
    code, out, _ = run(capsys, "cost-factor", "--r", "8%", "--dr", "3%", "--sdr", "0.6%", "--n", "30")
    assert code == 0
    assert float(out) == pytest.approx(0.15150, abs=5e-5)


def test_cost_factor_identity(capsys):
    code, out, _ = run(capsys, "cost-factor", "--r", "3%", "--dr", "3%", "--sdr", "0", "--n", "1")
    assert code == 0 and out.strip() == "1.0"


def test_sweep_fixture_relative_costs(capsys):
    code, out, _ = run(capsys, "sweep", "fig2_baseline.json", "--param", "spread", "--grid", "0,0.05,0.075",
                       "--format", "json")
    assert code == 0
    rel = [row["relative_cost"] for row in json.loads(out)["table"]]
    assert rel == pytest.approx([0.241, 1.0, 1.99], abs=0.005)


def test_sweep_from_file_csv(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(fixture_text("fig1_sweep"))
    code, out, _ = run(capsys, "sweep", str(path), "--format", "csv")
    assert code == 0
    table = read_csv_table("\n".join(line for line in out.splitlines() if not line.startswith("#")) + "\n")
    assert table.columns == ("lifetime_n", "cost", "relative_cost", "error")
    assert len(table) == 60


def test_curve_fig1_table(capsys):
    code, out, _ = run(capsys, "curve", "--spreads", "5%,8%", "--format", "csv")
    assert code == 0
    table = read_csv_table(out)
    assert table.columns == ("N", "yield", "cost_factor_spread5", "cost_factor_spread8")
    assert table.column("yield")[29] == pytest.approx(0.030633820814523642, rel=1e-15)


def test_nmin(capsys):
    code, out, _ = run(capsys, "nmin", "--spread", "5%", "--sdr", "0.6%", "--format", "json")
    assert code == 0 and json.loads(out)["n_min"] == 20


def test_sensitivity(capsys):
    code, out, _ = run(capsys, "sensitivity", "fig2_baseline", "--params", "efficiency,pci", "--format", "json")
    assert code == 0
    values = {r["parameter"]: r["value"] for r in json.loads(out)["table"]}
    assert values["efficiency"] == pytest.approx(-1, abs=1e-6) and values["pci"] == pytest.approx(1, abs=1e-6)


def test_compute_eq1_breakdown(capsys):
    code, out, _ = run(capsys, "compute", "darling_mc", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert sum(doc["components"].values()) == pytest.approx(doc["numerator"])
    assert doc["lcoe"] == pytest.approx(doc["numerator"] / doc["denominator_kwh"])


def test_overrides_echoed(capsys):
    code, out, _ = run(capsys, "compute", "fig2_baseline", "--set", "plant.sdr=5.6%", "--set",
                       "financing.spread=0.075", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["scenario"]["plant"]["sdr"] == pytest.approx(0.056)
    assert doc["scenario"]["financing"]["spread"] == 0.075


def test_mc_requires_seed_and_is_reproducible(capsys):
    with pytest.raises(SystemExit) as info:
        main(["mc", "darling_mc"])
    assert info.value.code == EXIT_USAGE
    capsys.readouterr()
    a = run(capsys, "mc", "darling_mc", "--seed", "3", "--samples", "300")
    b = run(capsys, "mc", "darling_mc", "--seed", "3", "--samples", "300")
    assert a[0] == 0 and a[1] == b[1]


@pytest.mark.parametrize("argv", [
    ("compute", "darling_mc", "--set", "plant.colour=1"),
    ("compute", "darling_mc", "--set", "nonsense"),
    ("compute", "no_such_file.json"),
    ("compute", "darling_mc", "--set", "plant.sdr=2"),
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == "" and "usage error" in err


def test_unknown_override_names_field(capsys):
    _, _, err = run(capsys, "compute", "darling_mc", "--set", "plant.colour=1")
    assert "plant.colour" in err


def test_evaluation_error(capsys):
    code, _, err = run(capsys, "nmin", "--spread", "5%", "--sdr", "0.6%", "--n-max", "80")
    assert code == EXIT_EVAL and "evaluation error" in err and "domain" in err


def test_bad_flag_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["cost-factor", "--r", "eight", "--dr", "3%", "--sdr", "0", "--n", "3"])
    assert info.value.code == EXIT_USAGE


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_documents_units(cmd):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[cmd]
    text = sub.format_help()
    assert "fraction" in text and "%" in text


def test_env_default_format(monkeypatch, capsys):
    monkeypatch.setenv("PVLCOE_FORMAT", "json")
    code, out, _ = run(capsys, "cost-factor", "--r", "3%", "--dr", "3%", "--sdr", "0", "--n", "1")
    assert json.loads(out)["cost_factor"] == 1.0


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "curve", "--grid", "1,2,3", "--format", "csv", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("years,yield\n")


def test_console_entry_point_byte_identical():
    cmd = [sys.executable, "-m", "pvlcoe.cli", "sweep", "fig2_baseline", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"relative_cost" in a
