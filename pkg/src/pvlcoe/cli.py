"""Command-line front end.

Rates on every flag are fractions (0.05) or percent strings ("5%").
Exit codes: 0 success, 2 usage or scenario error, 3 evaluation error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import scenario_io, sensitivity
from .cost_models import cost_factor, lcoe_eq1, lcoe_zero_coupon
from .scenario_io import FIXTURES, ScenarioError, emit_table, scenario_from_dict, scenario_to_dict
from .tables import Table
from .term_structure import YieldCurve, model_yield

EXIT_USAGE = 2
EXIT_EVAL = 3
FORMAT_ENV = "PVLCOE_FORMAT"

RATE_HELP = "fraction per year, e.g. 0.05, or percent string, e.g. 5%%"


class UsageError(Exception):
    pass


def rate(text: str) -> float:
    try:
        return scenario_io._frac(text if text.strip().endswith("%") else float(text), "value")
    except (ValueError, ScenarioError) as exc:
        raise argparse.ArgumentTypeError(f"invalid rate {text!r}") from exc


def rate_list(text: str) -> list[float]:
    return [rate(t) for t in text.split(",") if t.strip()]


def grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (inclusive); percent strings allowed."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range grid must be start:stop:step")
        start, stop, step = (rate(p) for p in parts)
        try:
            return list(sensitivity.SweepSpec.from_range("sdr", start, stop, step).values)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    values = rate_list(text)
    if not values:
        raise argparse.ArgumentTypeError("grid is empty")
    return values


# -- scenario handling ------------------------------------------------------

def _read_document(ref: str) -> dict:
    path = Path(ref)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    elif ref.removesuffix(".json") in FIXTURES:
        text = scenario_io.fixture_text(ref)
    else:
        raise UsageError(f"scenario {ref!r} not found (shipped fixtures: {', '.join(FIXTURES)})")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{ref}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _apply_override(doc: dict, item: str) -> None:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise UsageError(f"override {item!r} must look like section.field=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = doc
    for i, part in enumerate(parts[:-1]):
        if isinstance(node, list):
            try:
                node = node[int(part)]
            except (ValueError, IndexError):
                raise UsageError(f"override {key!r}: no element {part!r}") from None
        elif isinstance(node, dict):
            node = node.setdefault(part, {})
        else:
            raise UsageError(f"override {key!r}: {'.'.join(parts[:i + 1])} is not a section")
    last = parts[-1]
    if isinstance(node, list):
        try:
            node[int(last)] = value
        except (ValueError, IndexError):
            raise UsageError(f"override {key!r}: no element {last!r}") from None
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise UsageError(f"override {key!r}: parent is not a section")


def load(args):
    doc = _read_document(args.scenario)
    for item in args.overrides or ():
        _apply_override(doc, item)
    try:
        return scenario_from_dict(doc)
    except ScenarioError as exc:
        raise UsageError(f"invalid scenario: {exc}") from None


# -- output -----------------------------------------------------------------

def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item"):
        return _clean(v.item())
    return v


def _text_table(table: Table) -> str:
    def cell(v):
        if isinstance(v, float):
            return "nan" if math.isnan(v) else f"{v:.10g}"
        return "" if v is None else str(v)

    cells = [list(table.columns)] + [[cell(v) for v in row] for row in table.rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def render(fmt: str, result: dict, table: Table | None = None, scenario=None) -> str:
    """Text, CSV or JSON rendering of a result dict plus optional table."""
    echo = scenario_to_dict(scenario) if scenario is not None else None
    if fmt == "json":
        doc = dict(result)
        if table is not None:
            doc["table"] = table.records()
        if echo is not None:
            doc["scenario"] = echo
        return json.dumps(_clean(doc), indent=2) + "\n"
    if fmt == "csv":
        head = ""
        if echo is not None:
            head = "# scenario: " + json.dumps(_clean(echo), separators=(",", ":")) + "\n"
        if table is None:
            table = Table(tuple(result), [tuple(result.values())])
        return head + emit_table(table, "csv")
    out = []
    for k, v in result.items():
        if isinstance(v, dict):
            out.append(f"{k}:")
            out += [f"  {kk}: {vv!r}" for kk, vv in v.items()]
        else:
            out.append(f"{k}: {v!r}" if isinstance(v, float) else f"{k}: {v}")
    text = "\n".join(out) + ("\n" if out else "")
    if table is not None:
        text += ("\n" if out else "") + _text_table(table)
    if echo is not None:
        text += "\nscenario:\n" + json.dumps(_clean(echo), indent=2) + "\n"
    return text


# -- subcommands ------------------------------------------------------------

def cmd_compute(args):
    s = load(args)
    if s.model == "eq1":
        res = lcoe_eq1(s.plant, s.curve, s.financing, s.denominator)
        result = {"model": "eq1", "lcoe": res.lcoe, "numerator": res.numerator,
                  "denominator_kwh": res.denominator_kwh, "components": dict(res.components),
                  "discount_mode": res.discount_mode, "rate_mode": res.rate_mode,
                  "denominator": res.denominator, "loan_shape": res.loan_shape}
    elif s.model == "eq3":
        dr, r = sensitivity.horizon_rates(s)
        p = s.plant
        result = {"model": "eq3", "lcoe": lcoe_zero_coupon(p.pci, r, dr, p.lifetime_n, p.sdr, p.initial_kwh),
                  "cost_factor": cost_factor(r, dr, p.lifetime_n, p.sdr), "dr": dr, "r": r,
                  "discount_mode": s.financing.discount_mode}
    else:
        result = {"model": "lcic", "lcic": sensitivity.evaluate(s)}
    return render(args.format, result, scenario=s)


def cmd_cost_factor(args):
    value = cost_factor(args.r, args.dr, args.n, args.sdr)
    if args.format == "text":
        return f"{value!r}\n"
    return render(args.format, {"r": args.r, "dr": args.dr, "n": args.n, "sdr": args.sdr, "cost_factor": value})


def _curve_from_args(args):
    if args.scenario:
        return load(args).curve
    if args.flat_rate is not None:
        return YieldCurve.flat(args.flat_rate)
    return YieldCurve.parametric()


def cmd_curve(args):
    curve = _curve_from_args(args)
    points = args.grid if args.grid is not None else [float(n) for n in range(1, 61)]
    if args.spreads:
        ns = [int(t) for t in points]
        if any(n != t for n, t in zip(ns, points)):
            raise UsageError("--spreads needs an integer maturity grid")
        table = sensitivity.cost_factor_curves(curve, args.spreads, args.sdr, ns)
    else:
        table = Table(("years", "yield"), [(t, model_yield(curve, t)) for t in points])
    return render(args.format, {}, table) if args.format != "csv" else emit_table(table, "csv")


def cmd_sweep(args):
    s = load(args)
    spec = s.sweep
    if args.param:
        values = args.grid if args.grid is not None else (list(spec.values) if spec and spec.parameter == args.param else None)
        if values is None:
            raise UsageError("--param needs --grid unless the scenario sweeps the same parameter")
        norm = spec.normalization if spec is not None else None
        if args.param == "lifetime_n":
            values = [int(v) for v in values]
        try:
            spec = sensitivity.SweepSpec(args.param, tuple(values), norm)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif spec is None:
        raise UsageError("scenario has no sweep section; pass --param and --grid")
    elif args.grid is not None:
        spec = sensitivity.SweepSpec(spec.parameter, tuple(args.grid), spec.normalization)
    if args.no_normalize:
        spec = sensitivity.SweepSpec(spec.parameter, spec.values, None)
    table = sensitivity.sweep(spec, s)
    return render(args.format, {"parameter": spec.parameter, "normalization": spec.normalization or "baseline"},
                  table, scenario=s)


def cmd_nmin(args):
    if args.scenario:
        s = load(args)
        curve, spread, sdr = s.curve, s.financing.spread, s.plant.sdr
    else:
        curve, spread, sdr = _curve_from_args(args), args.spread, args.sdr
    if args.spread is not None:
        spread = args.spread
    if args.sdr is not None:
        sdr = args.sdr
    n, cost = sensitivity.find_nmin(curve, spread or 0.0, sdr or 0.0, args.n_max)
    return render(args.format, {"n_min": n, "cost": cost, "spread": spread or 0.0, "sdr": sdr or 0.0})


def cmd_sensitivity(args):
    s = load(args)
    report = sensitivity.elasticity_report(s, args.params, args.rel_step)
    return render(args.format, {"mode": report.mode, "rel_step": args.rel_step}, report.to_table(), scenario=s)


def cmd_mc(args):
    s = load(args)
    dists = list(s.distributions) or sensitivity.default_distributions()
    variants = ("legacy", "corrected") if args.variant == "both" else (args.variant,)
    rows = []
    for v in variants:
        rep = sensitivity.monte_carlo_rank_sensitivity(dists, s, v, args.samples, args.seed, args.workers)
        rows += [(v, k, val) for k, val in rep.entries]
    table = Table(("variant", "parameter", "rho"), rows)
    result = {"mode": "rank_correlation", "sample_count": args.samples, "seed": args.seed}
    return render(args.format, result, table, scenario=s)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    default_fmt = os.environ.get(FORMAT_ENV, "text")
    if default_fmt not in ("text", "csv", "json"):
        default_fmt = "text"
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default=default_fmt,
                        help=f"output format (default from ${FORMAT_ENV}, else text)")
    common.add_argument("-o", "--output", help="write to this file instead of standard output")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--set", dest="overrides", action="append", metavar="FIELD=VALUE",
                      help="override a scenario field, e.g. plant.sdr=0.8%% or financing.spread=0.07; "
                           "rates are fractions per year or percent strings; repeatable")

    p = argparse.ArgumentParser(prog="pvlcoe", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common, scen], help="evaluate a scenario with a cost breakdown",
                       description="Prints LCOE in currency per kWh; rates in the output are fractions per year.")
    c.add_argument("scenario", help="scenario JSON path or shipped fixture name")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("cost-factor", parents=[common], help="zero-coupon cost factor from flags",
                       description="(1+r)^n / ((1+dr)^n * sum_{k=1..n}(1-sdr)^k). All rates: " + RATE_HELP)
    c.add_argument("--r", type=rate, required=True, help="borrowing rate, " + RATE_HELP)
    c.add_argument("--dr", type=rate, required=True, help="discount rate, " + RATE_HELP)
    c.add_argument("--sdr", type=rate, required=True, help="system degradation rate, fraction per year or percent")
    c.add_argument("--n", type=int, required=True, help="lifetime in years")
    c.set_defaults(func=cmd_cost_factor)

    c = sub.add_parser("curve", parents=[common, scen], help="tabulate the risk-free curve",
                       description="Yields are printed as fractions per year (0.0306 = 3.06%%).")
    c.add_argument("scenario", nargs="?", help="take the curve from this scenario")
    c.add_argument("--flat-rate", type=rate, help="use a flat curve at this rate, " + RATE_HELP)
    c.add_argument("--grid", type=grid, help="maturities in years: a,b,c or start:stop:step (default 1:60:1)")
    c.add_argument("--spreads", type=rate_list,
                   help="also tabulate cost factors for these credit spreads, comma separated, " + RATE_HELP)
    c.add_argument("--sdr", type=rate, default=0.006, help="degradation rate for --spreads (default 0.6%%)")
    c.set_defaults(func=cmd_curve)

    c = sub.add_parser("sweep", parents=[common, scen], help="one-parameter sweep with relative cost",
                       description="Rate parameters (sdr, dr, spread, efficiency) take " + RATE_HELP + ".")
    c.add_argument("scenario")
    c.add_argument("--param", choices=sensitivity.PARAMETERS)
    c.add_argument("--grid", type=grid, help="a,b,c or start:stop:step")
    c.add_argument("--no-normalize", action="store_true", help="normalise to the baseline instead")
    c.set_defaults(func=cmd_sweep)

    c = sub.add_parser("nmin", parents=[common, scen], help="lifetime minimising the cost factor",
                       description="DR is read from the curve at each candidate lifetime.")
    c.add_argument("scenario", nargs="?")
    c.add_argument("--flat-rate", type=rate, help="flat curve at this rate instead of the 2011 fit")
    c.add_argument("--spread", type=rate, help="credit spread, " + RATE_HELP)
    c.add_argument("--sdr", type=rate, help="degradation rate, fraction per year or percent")
    c.add_argument("--n-max", type=int, default=60, help="largest lifetime scanned (default 60)")
    c.set_defaults(func=cmd_nmin)

    c = sub.add_parser("sensitivity", parents=[common, scen], help="log-log elasticities",
                       description="Dimensionless d ln(cost)/d ln(parameter) by central differences.")
    c.add_argument("scenario")
    c.add_argument("--params", type=lambda t: [x for x in t.split(",") if x],
                   default=["efficiency", "insolation", "pci", "sdr", "spread"])
    c.add_argument("--rel-step", type=float, default=1e-4, help="relative step, in (0, 0.1]")
    c.set_defaults(func=cmd_sensitivity)

    c = sub.add_parser("mc", parents=[common, scen], help="Monte Carlo Spearman rank sensitivities",
                       description="Distribution parameters for rates are fractions or percent strings.")
    c.add_argument("scenario")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--variant", choices=("legacy", "corrected", "both"), default="both")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_mc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"pvlcoe {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"pvlcoe {args.command}: evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
