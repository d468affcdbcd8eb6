"""Experiment configuration: versioned TOML with named geometric primitives.

A config file carries a schema tag, the scenario name with its seed, and
optional overrides for grid, domain, operator, and coefficient-family
parameters. Interior and window shapes are named primitives (interval,
ball, rectangle, union); coefficient fields come from analytic families
(constant, bump, plateau) or from a CSV column of per-point values in
lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .grid import Field, Grid

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "predicate_from_spec",
    "field_from_spec",
    "SCHEMA",
]

SCHEMA = "fraclab-config-v1"


class ConfigError(ValueError):
    """Malformed configuration; message names the offending field."""


@dataclass
class ScenarioConfig:
    name: str
    seed: int
    output: str | None
    overrides: dict = field(default_factory=dict)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    schema = raw.get("schema")
    if schema != SCHEMA:
        raise ConfigError(f"field 'schema': expected {SCHEMA!r}, got {schema!r}")
    scen = raw.get("scenario")
    if not isinstance(scen, dict) or "name" not in scen:
        raise ConfigError("field 'scenario.name' is required")
    name = scen["name"]
    seed = scen.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"field 'scenario.seed' must be an integer, got {seed!r}")
    output = scen.get("output")
    overrides = {k: v for k, v in raw.items() if k not in ("schema", "scenario")}
    return ScenarioConfig(name=name, seed=seed, output=output, overrides=overrides)


def predicate_from_spec(spec: dict, dim: int):
    """Build a point predicate from a shape table."""
    kind = spec.get("kind")
    if kind == "interval":
        if dim != 1:
            raise ConfigError("field 'kind': interval shapes need a 1-d grid")
        lo, hi = _need(spec, "lo"), _need(spec, "hi")
        return lambda x: lo < x < hi
    if kind == "ball":
        center = np.atleast_1d(np.asarray(_need(spec, "center"), dtype=float))
        radius = float(_need(spec, "radius"))
        if center.size != dim:
            raise ConfigError(f"field 'center': expected {dim} coordinates")
        return lambda *p: float(np.linalg.norm(np.asarray(p) - center)) < radius
    if kind == "rectangle":
        lo = np.atleast_1d(np.asarray(_need(spec, "lo"), dtype=float))
        hi = np.atleast_1d(np.asarray(_need(spec, "hi"), dtype=float))
        if lo.size != dim or hi.size != dim:
            raise ConfigError(f"field 'lo'/'hi': expected {dim} coordinates")
        return lambda *p: bool(np.all(lo < np.asarray(p)) and np.all(np.asarray(p) < hi))
    if kind == "union":
        parts = [predicate_from_spec(sub, dim) for sub in _need(spec, "of")]
        return lambda *p: any(pred(*p) for pred in parts)
    raise ConfigError(f"field 'kind': unknown shape {kind!r}")


def field_from_spec(spec: dict, grid: Grid, base: float = 0.0) -> Field:
    """Build a grid function from a named analytic family or a CSV file."""
    family = spec.get("family")
    if family == "constant":
        return Field.constant(grid, base + float(_need(spec, "value")))
    if family == "bump":
        center = np.atleast_1d(np.asarray(_need(spec, "center"), dtype=float))
        radius = float(_need(spec, "radius"))
        height = float(_need(spec, "height"))
        pts = grid.points()
        r = np.linalg.norm(pts - center[None, :], axis=1) / radius
        vals = np.where(r < 1.0, height * np.exp(1.0 - 1.0 / np.maximum(1.0 - r**2, 1e-300)), 0.0)
        return Field(grid, base + vals)
    if family == "plateau":
        center = np.atleast_1d(np.asarray(_need(spec, "center"), dtype=float))
        radius = float(_need(spec, "radius"))
        height = float(_need(spec, "height"))
        pts = grid.points()
        r = np.linalg.norm(pts - center[None, :], axis=1)
        return Field(grid, base + np.where(r < radius, height, 0.0))
    if family == "csv":
        path = Path(_need(spec, "path"))
        try:
            vals = np.loadtxt(path, delimiter=",")
        except OSError as exc:
            raise ConfigError(f"field 'path': cannot read {path}: {exc}") from exc
        return Field(grid, base + vals.ravel())
    raise ConfigError(f"field 'family': unknown family {family!r}")


def _need(spec: dict, key: str):
    if key not in spec:
        raise ConfigError(f"field '{key}' is required in {spec.get('kind') or spec.get('family') or 'table'}")
    return spec[key]
