"""JSON schemas for preferences, populations and markets.

Floats are written with 17 significant digits so every value re-parses to
the identical double; non-finite values are written as the strings
"inf", "-inf" and "nan".
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .prefcore import (
    CES,
    CobbDouglas,
    Leontief,
    Linear,
    Mixture,
    PiecewiseLinearE,
    Population,
    Preference,
    Translog,
    TwoGoodQ,
)


class SchemaError(ValueError):
    """Input does not match the expected JSON schema."""


def num(x: Any) -> float:
    """Parse a JSON number, accepting the non-finite string forms."""
    if isinstance(x, bool):
        raise SchemaError("expected a number, got a boolean")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str) and x in ("inf", "-inf", "nan", "Infinity", "-Infinity", "NaN"):
        return float(x.replace("Infinity", "inf").replace("NaN", "nan"))
    raise SchemaError(f"expected a number, got {x!r}")


def _nums(xs: Any, name: str) -> list[float]:
    if not isinstance(xs, list) or not xs:
        raise SchemaError(f"'{name}' must be a nonempty list of numbers")
    return [num(x) for x in xs]


def _get(d: dict, key: str, ctx: str):
    if not isinstance(d, dict):
        raise SchemaError(f"{ctx} must be an object")
    if key not in d:
        raise SchemaError(f"{ctx} is missing '{key}'")
    return d[key]


def pref_from_dict(d: dict) -> Preference:
    kind = _get(d, "kind", "preference")
    try:
        if kind == "linear":
            return Linear(_nums(_get(d, "v", "linear"), "v"))
        if kind == "leontief":
            return Leontief(_nums(_get(d, "v", "leontief"), "v"))
        if kind == "cobb_douglas":
            return CobbDouglas(_nums(_get(d, "a", "cobb_douglas"), "a"))
        if kind == "ces":
            return CES(_nums(_get(d, "a", "ces"), "a"), num(_get(d, "sigma", "ces")))
        if kind == "translog":
            return Translog(num(_get(d, "alpha", "translog")), num(_get(d, "beta", "translog")))
        if kind == "pwl":
            rows = _get(d, "C", "pwl")
            if not isinstance(rows, list) or not rows:
                raise SchemaError("'C' must be a nonempty list of rows")
            return PiecewiseLinearE([_nums(r, "C row") for r in rows])
        if kind == "two_good_q":
            br = _get(d, "breaks", "two_good_q")
            return TwoGoodQ(_nums(br, "breaks") if br else [], _nums(_get(d, "values", "two_good_q"), "values"))
        if kind == "mixture":
            comps = _get(d, "components", "mixture")
            if not isinstance(comps, list) or not comps:
                raise SchemaError("'components' must be a nonempty list")
            return Mixture(_nums(_get(d, "weights", "mixture"), "weights"),
                           [pref_from_dict(c) for c in comps], bool(d.get("signed", False)))
    except SchemaError:
        raise
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"invalid {kind} preference: {exc}") from exc
    raise SchemaError(f"unknown preference kind {kind!r}")


def pref_to_dict(pref: Preference) -> dict:
    return pref.to_dict()


def population_from_dict(d: dict) -> Population:
    agents = _get(d, "agents", "population")
    if not isinstance(agents, list) or not agents:
        raise SchemaError("'agents' must be a nonempty list")
    pairs = [(pref_from_dict(_get(a, "pref", "agent")), num(_get(a, "budget", "agent"))) for a in agents]
    try:
        pop = Population.of(pairs)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    if "n" in d and int(d["n"]) != pop.n:
        raise SchemaError(f"declared n={d['n']} but preferences have n={pop.n}")
    return pop


def population_to_dict(pop: Population) -> dict:
    return {"n": pop.n, "agents": [{"budget": a.budget, "pref": a.pref.to_dict()} for a in pop.agents]}


def market_from_dict(d: dict) -> tuple[Population, np.ndarray, float]:
    pop = population_from_dict(_get(d, "population", "market"))
    X = np.array(_nums(_get(d, "supply", "market"), "supply"))
    if X.shape != (pop.n,) or np.any(X <= 0):
        raise SchemaError("supply must be a positive vector with one entry per good")
    return pop, X, num(d.get("tol", 1e-9))


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int | None = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[" + sep.join(f"{pad}{dumps(v, indent, _level + 1)}" for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def write_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj) + "\n")


__all__ = [
    "SchemaError", "dumps", "fmt_float", "loads", "market_from_dict", "num", "population_from_dict",
    "population_to_dict", "pref_from_dict", "pref_to_dict", "read_json", "write_json",
]
