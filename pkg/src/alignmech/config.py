"""Experiment configuration: the JSON document format and its defaults.

Every key is optional::

    {
      "nAgents": 3,                      # >= 2
      "mode": "scalar",                  # or "vector"
      "thetaMax": 4.0,                   # initial misalignments drawn on [0, thetaMax]
      "dimension": 5,                    # tasks per priority vector (vector mode)
      "metric": "L2",                    # L1 | L2 | Linf
      "scheme": "SecondPriceLinear",     # or "ReportOnly(a,b)", "RealizationOnly(a,b)",
                                         #    "ClaimedEffort", "VCGStyle", or an object
      "cost": "Linear",                  # Linear | Quadratic | Power(p)
      "profit": "QuadraticDecreasing(4,1)",  # or LinearDecreasing(s0,a)
      "tieBreak": "ProSocial",           # ProSocial | Adversarial | MaxAlignment | Lazy
      "thetaGrid": {"lo": 0, "hi": thetaMax, "step": 0.25},
      "gammaGrid": {"lo": 0, "hi": thetaMax, "step": 0.05},
      "seeds": 100,                      # count, explicit list, or {"count": n, "base": b}
      "strategicAgents": [],             # agent ids that best-respond instead of reporting truthfully
      "output": null, "format": "csv",
      "sweep": {},                       # {"configKey": [values, ...], ...}, Cartesian product
      "property": "IC",                  # counterexample target: IC | IR | SO | PaymentProperty
      "budget": 1000000, "threshold": null, "workers": 1
    }
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .agents import TieBreak
from .core import (ConfigurationError, CostFamily, CostModel, Grid, Metric, ProfitFamily,
                   ProfitModel)
from .mechanism import PaymentScheme, SchemeKind

UINT64_MASK = (1 << 64) - 1


class ConfigError(ConfigurationError):
    """Invalid configuration; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    n_agents: int = 3
    mode: str = "scalar"
    theta_max: float = 4.0
    dimension: int = 5
    metric: Metric = Metric.L2
    scheme: PaymentScheme = PaymentScheme()
    cost: CostModel = CostModel()
    profit: ProfitModel = ProfitModel()
    tie_break: TieBreak = TieBreak.PRO_SOCIAL
    theta_grid: Grid = Grid(0.0, 4.0, 0.25)
    gamma_grid: Grid = Grid(0.0, 4.0, 0.05)
    seeds: tuple[int, ...] = tuple(range(100))
    strategic_agents: tuple[int, ...] = ()
    output: Optional[str] = None
    format: str = "csv"
    sweep: dict = field(default_factory=dict, compare=False)
    property: str = "IC"
    budget: int = 1_000_000
    threshold: Optional[float] = None
    workers: int = 1


_NAME_ARGS = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def parse_named(text: str, key: str) -> tuple[str, list[float]]:
    """Split ``"Name(1, 2.5)"`` into ``("Name", [1.0, 2.5])``."""
    m = _NAME_ARGS.match(str(text))
    if not m:
        raise ConfigError(key, f"cannot parse {text!r}")
    name, args = m.group(1), m.group(2)
    values = []
    if args and args.strip():
        try:
            values = [float(a) for a in args.split(",")]
        except ValueError:
            raise ConfigError(key, f"non-numeric parameter in {text!r}") from None
    return name, values


def _lookup(enum_cls, name: str, key: str):
    for member in enum_cls:
        if member.value.lower() == str(name).lower():
            return member
    raise ConfigError(key, f"unknown value {name!r}; expected one of "
                           f"{[m.value for m in enum_cls]}")


def parse_scheme(value: Any, key: str = "scheme") -> PaymentScheme:
    if isinstance(value, dict):
        _reject_unknown(value, {"kind", "intercept", "slope", "enforceRealizationCap"}, key)
        kind = _lookup(SchemeKind, value.get("kind", "SecondPriceLinear"), f"{key}.kind")
        cap = value.get("enforceRealizationCap", True)
        if not isinstance(cap, bool):
            raise ConfigError(f"{key}.enforceRealizationCap", "must be a boolean")
        return PaymentScheme(kind, _number(value.get("intercept", 0.0), f"{key}.intercept"),
                             _number(value.get("slope", 0.0), f"{key}.slope"), cap)
    name, args = parse_named(value, key)
    kind = _lookup(SchemeKind, name, key)
    if kind in (SchemeKind.REPORT_ONLY, SchemeKind.REALIZATION_ONLY):
        if len(args) != 2:
            raise ConfigError(key, f"{kind.value} takes (intercept, slope)")
        return PaymentScheme(kind, args[0], args[1])
    if args:
        raise ConfigError(key, f"{kind.value} takes no parameters")
    return PaymentScheme(kind)


def parse_cost(value: Any, key: str = "cost") -> CostModel:
    if isinstance(value, dict):
        _reject_unknown(value, {"family", "p"}, key)
        family = _lookup(CostFamily, value.get("family", "Linear"), f"{key}.family")
        p = _number(value.get("p", 1.0), f"{key}.p")
    else:
        name, args = parse_named(value, key)
        family = _lookup(CostFamily, name, key)
        if family is CostFamily.POWER and len(args) != 1:
            raise ConfigError(key, "Power takes one exponent, e.g. Power(3)")
        p = args[0] if args else 1.0
    if family is CostFamily.POWER and p < 1:
        raise ConfigError(f"{key}.p", "exponent must be >= 1")
    return CostModel(family, p)


def parse_profit(value: Any, key: str = "profit") -> ProfitModel:
    if isinstance(value, dict):
        _reject_unknown(value, {"family", "s0", "slope"}, key)
        family = _lookup(ProfitFamily, value.get("family", "QuadraticDecreasing"),
                         f"{key}.family")
        s0 = _number(value.get("s0", 4.0), f"{key}.s0")
        slope = _number(value.get("slope", 1.0), f"{key}.slope")
    else:
        name, args = parse_named(value, key)
        family = _lookup(ProfitFamily, name, key)
        if len(args) not in (0, 2):
            raise ConfigError(key, f"{family.value} takes (s0, slope)")
        s0, slope = args if args else (4.0, 1.0)
    if s0 < 0:
        raise ConfigError(f"{key}.s0", "must be >= 0")
    if slope <= 0:
        raise ConfigError(f"{key}.slope", "must be > 0")
    return ProfitModel(family, s0, slope)


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    return value


def _integer(value: Any, key: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be >= {minimum}")
    return value


def _reject_unknown(doc: dict, known: set, prefix: str = "") -> None:
    for k in doc:
        if k not in known:
            raise ConfigError(f"{prefix}.{k}" if prefix else k, "unknown key")


def _grid(doc: Any, key: str, hi_default: float, step_default: float) -> Grid:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(key, "expected an object with lo/hi/step")
    _reject_unknown(doc, {"lo", "hi", "step"}, key)
    lo = _number(doc.get("lo", 0.0), f"{key}.lo")
    hi = _number(doc.get("hi", hi_default), f"{key}.hi")
    step = _number(doc.get("step", step_default), f"{key}.step")
    if step <= 0:
        raise ConfigError(f"{key}.step", "must be > 0")
    if lo > hi:
        raise ConfigError(f"{key}.lo", "must not exceed hi")
    return Grid(lo, hi, step)


def parse_seeds(value: Any, key: str = "seeds") -> tuple[int, ...]:
    if isinstance(value, bool):
        raise ConfigError(key, "expected a count, list or {count, base}")
    if isinstance(value, int):
        return tuple(range(_integer(value, key, 0)))
    if isinstance(value, list):
        seeds = tuple(_integer(s, f"{key}[{i}]", 0) for i, s in enumerate(value))
        for i, s in enumerate(seeds):
            if s > UINT64_MASK:
                raise ConfigError(f"{key}[{i}]", "must fit in 64 bits")
        return seeds
    if isinstance(value, dict):
        _reject_unknown(value, {"count", "base"}, key)
        count = _integer(value.get("count", 100), f"{key}.count", 0)
        base = _integer(value.get("base", 0), f"{key}.base", 0)
        return tuple((base + i) & UINT64_MASK for i in range(count))
    raise ConfigError(key, "expected a count, list or {count, base}")


KNOWN_KEYS = {
    "nAgents", "mode", "thetaMax", "dimension", "metric", "scheme", "cost", "profit",
    "tieBreak", "thetaGrid", "gammaGrid", "seeds", "strategicAgents", "output", "format",
    "sweep", "property", "budget", "threshold", "workers",
}
PROPERTIES = ("IC", "IR", "SO", "PaymentProperty")


def config_from_dict(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    _reject_unknown(doc, KNOWN_KEYS)
    n = _integer(doc.get("nAgents", 3), "nAgents", 2)
    mode = doc.get("mode", "scalar")
    if mode not in ("scalar", "vector"):
        raise ConfigError("mode", "must be 'scalar' or 'vector'")
    theta_max = _number(doc.get("thetaMax", 4.0), "thetaMax")
    if theta_max < 0:
        raise ConfigError("thetaMax", "must be >= 0")
    strategic = doc.get("strategicAgents", [])
    if not isinstance(strategic, list):
        raise ConfigError("strategicAgents", "expected a list of agent ids")
    strategic = tuple(_integer(s, f"strategicAgents[{i}]", 1) for i, s in enumerate(strategic))
    for i, s in enumerate(strategic):
        if s > n:
            raise ConfigError(f"strategicAgents[{i}]", f"no agent {s} among {n}")
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", "must be 'csv' or 'json'")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")
    sweep = doc.get("sweep", {})
    if not isinstance(sweep, dict):
        raise ConfigError("sweep", "expected an object mapping keys to value lists")
    for k, vals in sweep.items():
        if k not in KNOWN_KEYS - {"sweep", "output", "format", "workers"}:
            raise ConfigError(f"sweep.{k}", "unknown or non-sweepable key")
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"sweep.{k}", "expected a nonempty list")
    prop = doc.get("property", "IC")
    if prop not in PROPERTIES:
        raise ConfigError("property", f"expected one of {PROPERTIES}")
    threshold = doc.get("threshold")
    if threshold is not None:
        threshold = _number(threshold, "threshold")
    tie = doc.get("tieBreak", "ProSocial")
    try:
        metric = Metric(doc.get("metric", "L2"))
    except ValueError:
        raise ConfigError("metric", "expected L1, L2 or Linf") from None
    return ScenarioConfig(
        n_agents=n,
        mode=mode,
        theta_max=theta_max,
        dimension=_integer(doc.get("dimension", 5), "dimension", 1),
        metric=metric,
        scheme=parse_scheme(doc.get("scheme", "SecondPriceLinear")),
        cost=parse_cost(doc.get("cost", "Linear")),
        profit=parse_profit(doc.get("profit", "QuadraticDecreasing(4,1)")),
        tie_break=_lookup(TieBreak, tie, "tieBreak"),
        theta_grid=_grid(doc.get("thetaGrid"), "thetaGrid", theta_max, 0.25),
        gamma_grid=_grid(doc.get("gammaGrid"), "gammaGrid", theta_max, 0.05),
        seeds=parse_seeds(doc.get("seeds", 100)),
        strategic_agents=strategic,
        output=output,
        format=fmt,
        sweep=sweep,
        property=prop,
        budget=_integer(doc.get("budget", 1_000_000), "budget", 1),
        threshold=threshold,
        workers=_integer(doc.get("workers", 1), "workers", 1),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON configuration document, applying defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"malformed JSON: {exc}") from None
    return config_from_dict(doc)


__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "config_from_dict",
           "parse_scheme", "parse_cost", "parse_profit", "parse_seeds"]
