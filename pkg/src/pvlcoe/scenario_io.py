"""JSON scenario documents and CSV/JSON result tables.

Scenario schema (``schema_version`` 1)::

    {
      "schema_version": 1,
      "name": "...", "description": "...",          optional
      "model": "eq1" | "eq3" | "lcic",               default "eq3"
      "denominator": "physical_corrected" | "discounted_legacy",
      "plant": {
        "pci", "initial_kwh",                          required
        "sdr", "lifetime_n", "efficiency", "insolation",
        "ao", "tr", "rv", "degradation_exponent": "n_minus_one" | "n"
      },
      "curve": {"kind": "parametric", "params": [a, b, c, d]}
             | {"kind": "flat", "flat_rate": r}
             | {"kind": "tabulated", "table": [[years, r], ...]},
      "financing": {"spread", "discount_mode", "rate_mode",
                    "loan_shape", "financed_fraction"},
      "module_replacement": {"c_bom", "module_life",
                             "energy_fraction_remaining", "horizon"},
      "sweep": {"parameter", "values": [...] | "start"/"stop"/"step",
                "normalization": {parameter: value}},
      "distributions": [{"parameter", "shape": "normal" | "uniform" | "point",
                         "mean", "sd", "lo", "hi", "value", "bounds": [lo, hi]}]
    }

Rates and other fractions are plain numbers (0.05) or percent strings
("5%"). Unknown keys anywhere are rejected.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .cost_models import DENOMINATORS, ModuleReplacementSpec, PlantSpec
from .sensitivity import PARAMETERS, SAMPLEABLE, DistributionSpec, SweepSpec
from .tables import Table
from .term_structure import FinancingTerms, YieldCurve

SCHEMA_VERSION = 1
MODELS = ("eq1", "eq3", "lcic")
FIXTURES = ("fig1_sweep", "fig2_baseline", "darling_mc")

# parameters whose values are fractions and may be written as "x%"
_FRACTION_PARAMS = {"sdr", "dr", "spread", "efficiency"}


class ScenarioError(ValueError):
    """Base class for scenario loading failures."""


class ScenarioParseError(ScenarioError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class ScenarioValidationError(ScenarioError):
    def __init__(self, field: str, msg: str):
        super().__init__(f"{field}: {msg}")
        self.field = field


@dataclass(frozen=True)
class Scenario:
    plant: PlantSpec
    curve: YieldCurve = field(default_factory=YieldCurve.parametric)
    financing: FinancingTerms = field(default_factory=FinancingTerms)
    model: str = "eq3"
    denominator: str = "physical_corrected"
    module_replacement: ModuleReplacementSpec | None = None
    sweep: SweepSpec | None = None
    distributions: tuple[DistributionSpec, ...] = ()
    name: str = ""
    description: str = ""

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.denominator not in DENOMINATORS:
            raise ValueError(f"denominator must be one of {DENOMINATORS}")
        if self.model == "lcic" and self.module_replacement is None:
            raise ValueError("model 'lcic' needs module_replacement")


# -- field readers ----------------------------------------------------------

_PERCENT = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*%\s*$")


def _obj(v, path):
    if not isinstance(v, dict):
        raise ScenarioValidationError(path, f"expected an object, got {type(v).__name__}")
    return v


def _keys(d, path, allowed, required=()):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ScenarioValidationError(f"{path}.{unknown[0]}" if path else unknown[0], "unknown key")
    for k in required:
        if k not in d:
            raise ScenarioValidationError(f"{path}.{k}" if path else k, "required field missing")


def _num(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioValidationError(path, f"expected a number, got {v!r}")
    x = float(v)
    if not math.isfinite(x):
        raise ScenarioValidationError(path, f"must be finite, got {v!r}")
    return x


def _frac(v, path):
    """Number, or a percent string divided by 100."""
    if isinstance(v, str):
        m = _PERCENT.match(v)
        if not m:
            raise ScenarioValidationError(path, f"expected a number or percent string, got {v!r}")
        return float(m.group(1)) / 100.0
    return _num(v, path)


def _int(v, path):
    x = _num(v, path)
    if x != int(x):
        raise ScenarioValidationError(path, f"expected an integer, got {v!r}")
    return int(x)


def _str(v, path):
    if not isinstance(v, str):
        raise ScenarioValidationError(path, f"expected a string, got {v!r}")
    return v


def _param_value(pid, v, path):
    if pid == "lifetime_n":
        return _int(v, path)
    return _frac(v, path) if pid in _FRACTION_PARAMS else _num(v, path)


def _build(cls, path, **kwargs):
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ScenarioValidationError(path, str(exc)) from None


# -- section parsers --------------------------------------------------------

_PLANT_FRACTIONS = ("sdr", "efficiency", "tr")
_PLANT_NUMBERS = ("pci", "initial_kwh", "insolation", "ao", "rv")


def _plant(d):
    d = _obj(d, "plant")
    _keys(d, "plant", _PLANT_FRACTIONS + _PLANT_NUMBERS + ("lifetime_n", "degradation_exponent"),
          required=("pci", "initial_kwh"))
    kw: dict[str, Any] = {}
    for k in _PLANT_FRACTIONS:
        if k in d:
            kw[k] = _frac(d[k], f"plant.{k}")
    for k in _PLANT_NUMBERS:
        if k in d:
            kw[k] = _num(d[k], f"plant.{k}")
    if "lifetime_n" in d:
        kw["lifetime_n"] = _int(d["lifetime_n"], "plant.lifetime_n")
    if "degradation_exponent" in d:
        kw["degradation_exponent"] = _str(d["degradation_exponent"], "plant.degradation_exponent")
    return _build(PlantSpec, "plant", **kw)


def _curve(d):
    d = _obj(d, "curve")
    kind = _str(d.get("kind", "parametric"), "curve.kind")
    if kind == "parametric":
        _keys(d, "curve", ("kind", "params"))
        params = d.get("params", None)
        if params is None:
            return YieldCurve.parametric()
        if not isinstance(params, list) or len(params) != 4:
            raise ScenarioValidationError("curve.params", "expected a list of four numbers")
        return _build(YieldCurve, "curve", kind="parametric",
                      params=tuple(_num(p, f"curve.params[{i}]") for i, p in enumerate(params)))
    if kind == "flat":
        _keys(d, "curve", ("kind", "flat_rate"), required=("flat_rate",))
        return _build(YieldCurve, "curve", kind="flat", flat_rate=_frac(d["flat_rate"], "curve.flat_rate"))
    if kind == "tabulated":
        _keys(d, "curve", ("kind", "table"), required=("table",))
        table = d["table"]
        if not isinstance(table, list):
            raise ScenarioValidationError("curve.table", "expected a list of [years, rate] pairs")
        points = []
        for i, pt in enumerate(table):
            if not isinstance(pt, list) or len(pt) != 2:
                raise ScenarioValidationError(f"curve.table[{i}]", "expected a [years, rate] pair")
            points.append((_num(pt[0], f"curve.table[{i}][0]"), _frac(pt[1], f"curve.table[{i}][1]")))
        return _build(YieldCurve, "curve", kind="tabulated", table=tuple(points))
    raise ScenarioValidationError("curve.kind", f"must be parametric, flat or tabulated, got {kind!r}")


def _financing(d):
    d = _obj(d, "financing")
    _keys(d, "financing", ("spread", "discount_mode", "rate_mode", "loan_shape", "financed_fraction"))
    kw: dict[str, Any] = {}
    for k in ("spread", "financed_fraction"):
        if k in d:
            kw[k] = _frac(d[k], f"financing.{k}")
    for k in ("discount_mode", "rate_mode", "loan_shape"):
        if k in d:
            kw[k] = _str(d[k], f"financing.{k}")
    return _build(FinancingTerms, "financing", **kw)


def _module_replacement(d):
    d = _obj(d, "module_replacement")
    _keys(d, "module_replacement", ("c_bom", "module_life", "energy_fraction_remaining", "horizon"),
          required=("c_bom", "module_life"))
    kw: dict[str, Any] = {
        "c_bom": _num(d["c_bom"], "module_replacement.c_bom"),
        "module_life": _int(d["module_life"], "module_replacement.module_life"),
    }
    if "energy_fraction_remaining" in d:
        kw["energy_fraction_remaining"] = _frac(
            d["energy_fraction_remaining"], "module_replacement.energy_fraction_remaining")
    if "horizon" in d:
        kw["horizon"] = _int(d["horizon"], "module_replacement.horizon")
    return _build(ModuleReplacementSpec, "module_replacement", **kw)


def _normalization(d, path):
    d = _obj(d, path)
    _keys(d, path, PARAMETERS)
    return {k: _param_value(k, v, f"{path}.{k}") for k, v in d.items()}


def _sweep(d):
    d = _obj(d, "sweep")
    _keys(d, "sweep", ("parameter", "values", "start", "stop", "step", "normalization"), required=("parameter",))
    pid = _str(d["parameter"], "sweep.parameter")
    if pid not in PARAMETERS:
        raise ScenarioValidationError("sweep.parameter", f"must be one of {PARAMETERS}, got {pid!r}")
    norm = _normalization(d["normalization"], "sweep.normalization") if "normalization" in d else None
    if "values" in d:
        if any(k in d for k in ("start", "stop", "step")):
            raise ScenarioValidationError("sweep", "give either values or start/stop/step, not both")
        if not isinstance(d["values"], list):
            raise ScenarioValidationError("sweep.values", "expected a list")
        values = tuple(_param_value(pid, v, f"sweep.values[{i}]") for i, v in enumerate(d["values"]))
        return _build(SweepSpec, "sweep", parameter=pid, values=values, normalization=norm)
    for k in ("start", "stop", "step"):
        if k not in d:
            raise ScenarioValidationError(f"sweep.{k}", "required field missing")
    conv = _frac if pid in _FRACTION_PARAMS else _num
    start, stop, step = (conv(d[k], f"sweep.{k}") for k in ("start", "stop", "step"))
    try:
        spec = SweepSpec.from_range(pid, start, stop, step, norm)
    except ValueError as exc:
        raise ScenarioValidationError("sweep", str(exc)) from None
    if pid == "lifetime_n":
        spec = _build(SweepSpec, "sweep", parameter=pid, values=tuple(int(round(v)) for v in spec.values),
                      normalization=norm)
    return spec


def _distribution(d, path):
    d = _obj(d, path)
    _keys(d, path, ("parameter", "shape", "mean", "sd", "lo", "hi", "value", "bounds"),
          required=("parameter", "shape"))
    pid = _str(d["parameter"], f"{path}.parameter")
    if pid not in SAMPLEABLE:
        raise ScenarioValidationError(f"{path}.parameter", f"must be one of {SAMPLEABLE}, got {pid!r}")
    kw: dict[str, Any] = {"parameter": pid, "shape": _str(d["shape"], f"{path}.shape")}
    for k in ("mean", "sd", "lo", "hi", "value"):
        if k in d:
            kw[k] = _param_value(pid, d[k], f"{path}.{k}")
    if "bounds" in d:
        b = d["bounds"]
        if not isinstance(b, list) or len(b) != 2:
            raise ScenarioValidationError(f"{path}.bounds", "expected [lo, hi]")
        kw["bounds"] = tuple(_param_value(pid, v, f"{path}.bounds[{i}]") for i, v in enumerate(b))
    return _build(DistributionSpec, path, **kw)


_TOP_KEYS = ("schema_version", "name", "description", "model", "denominator", "plant", "curve",
             "financing", "module_replacement", "sweep", "distributions")


def scenario_from_dict(doc: Any) -> Scenario:
    """Validate a decoded JSON document and build a :class:`Scenario`."""
    doc = _obj(doc, "<document>")
    _keys(doc, "", _TOP_KEYS, required=("schema_version", "plant"))
    version = doc["schema_version"]
    if isinstance(version, bool) or version != SCHEMA_VERSION:
        raise ScenarioValidationError("schema_version", f"unsupported version {version!r}; expected {SCHEMA_VERSION}")
    kw: dict[str, Any] = {"plant": _plant(doc["plant"])}
    for k in ("name", "description", "model", "denominator"):
        if k in doc:
            kw[k] = _str(doc[k], k)
    if "model" in kw and kw["model"] not in MODELS:
        raise ScenarioValidationError("model", f"must be one of {MODELS}, got {kw['model']!r}")
    if "curve" in doc:
        kw["curve"] = _curve(doc["curve"])
    if "financing" in doc:
        kw["financing"] = _financing(doc["financing"])
    if "module_replacement" in doc:
        kw["module_replacement"] = _module_replacement(doc["module_replacement"])
    if "sweep" in doc:
        kw["sweep"] = _sweep(doc["sweep"])
    if "distributions" in doc:
        dists = doc["distributions"]
        if not isinstance(dists, list):
            raise ScenarioValidationError("distributions", "expected a list")
        kw["distributions"] = tuple(_distribution(x, f"distributions[{i}]") for i, x in enumerate(dists))
        names = [x.parameter for x in kw["distributions"]]
        if len(set(names)) != len(names):
            raise ScenarioValidationError("distributions", "each parameter may appear only once")
    return _build(Scenario, "<document>", **kw)


def load_scenario(source: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(exc.msg, exc.lineno, exc.colno) from None
    except RecursionError:
        raise ScenarioParseError("document nested too deeply", 1, 1) from None
    return scenario_from_dict(doc)


def load_scenario_file(path: str | Path) -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def fixture_text(name: str) -> str:
    """Text of a shipped fixture (``fig1_sweep``, ``fig2_baseline`` or ``darling_mc``)."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in FIXTURES:
        raise KeyError(f"no fixture {name!r}; available: {FIXTURES}")
    return resources.files("pvlcoe").joinpath("data", f"{stem}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Scenario:
    return load_scenario(fixture_text(name))


# -- serialisation ----------------------------------------------------------

def _drop_none(d):
    return {k: v for k, v in d.items() if v is not None}


def scenario_to_dict(s: Scenario) -> dict:
    """Inverse of :func:`scenario_from_dict`; rates are written as plain fractions."""
    curve: dict[str, Any] = {"kind": s.curve.kind}
    if s.curve.kind == "parametric":
        curve["params"] = list(s.curve.params)
    elif s.curve.kind == "flat":
        curve["flat_rate"] = s.curve.flat_rate
    else:
        curve["table"] = [list(p) for p in s.curve.table]
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "description": s.description,
        "model": s.model,
        "denominator": s.denominator,
        "plant": asdict(s.plant),
        "curve": curve,
        "financing": asdict(s.financing),
    }
    if s.module_replacement is not None:
        doc["module_replacement"] = asdict(s.module_replacement)
    if s.sweep is not None:
        sw: dict[str, Any] = {"parameter": s.sweep.parameter, "values": list(s.sweep.values)}
        if s.sweep.normalization is not None:
            sw["normalization"] = dict(s.sweep.normalization)
        doc["sweep"] = sw
    if s.distributions:
        doc["distributions"] = []
        for d in s.distributions:
            rec = _drop_none(asdict(d))
            if "bounds" in rec:
                rec["bounds"] = list(rec["bounds"])
            doc["distributions"].append(rec)
    return doc


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "" if math.isnan(v) else format(v, ".17g")
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):  # numpy scalar
        return _json_cell(v.item())
    return v


def emit_table(table: Table, fmt: str = "csv") -> str:
    """Render `table` as CSV (header row, 17 significant digits) or a JSON array of records.

    NaN becomes an empty CSV field or JSON null.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unsupported table format {fmt!r}; expected 'csv' or 'json'")
    if not table.columns or not table.rows:
        raise ValueError("cannot emit an empty table")
    if fmt == "json":
        records = [{c: _json_cell(v) for c, v in zip(table.columns, row)} for row in table.rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(_json_cell(v)) for v in row])
    return buf.getvalue()


def read_csv_table(text: str) -> Table:
    """Parse CSV written by :func:`emit_table`; numeric cells become int or float."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)

    def conv(cell):
        if cell == "":
            return math.nan
        for typ in (int, float):
            try:
                return typ(cell)
            except ValueError:
                pass
        return cell

    return Table(tuple(header), [tuple(conv(c) for c in row) for row in reader])
