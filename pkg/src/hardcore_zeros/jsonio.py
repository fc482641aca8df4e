"""Canonical JSON: sorted keys, compact separators, floats as %.15g, complex as {"re", "im"}."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources

SCHEMA_VERSION = 1


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.15g" % x


def dumps(obj) -> str:
    """Deterministic serialization; identical input gives identical bytes."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, Fraction):
        return _float(float(obj))
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + dumps(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_schema(command: str, version: int = SCHEMA_VERSION) -> dict:
    """The shipped JSON schema for a subcommand's output."""
    text = resources.files("hardcore_zeros").joinpath("schemas", f"{command}.v{version}.json").read_text()
    return json.loads(text)
