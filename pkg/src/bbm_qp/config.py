"""Flat ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment. Function parameters and
lists are comma separated. Axes accept either an explicit list
(``0, 0.5, 1``) or ``start:stop:count`` for evenly spaced points; schedules
additionally accept ``geom:start:stop:count``.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigurationError
from .problem import CATALOG, ForcingDescriptor, FunctionDescriptor, Grid, ProblemSpec
from .quadrature import QuadratureConfig
from .reference import RIGHT_BCS, FdConfig, PicardConfig

SOLVE_METHODS = ("semianalytic", "fd", "integral_equation", "transport")


class ConfigParseError(ConfigurationError):
    """Malformed configuration text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _float(text: str) -> float:
    return float(text)


def _opt_float(text: str) -> float | None:
    return None if text.lower() in ("none", "") else float(text)


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip())


def _words(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text

    return parse


def _kind(text: str) -> str:
    if text not in CATALOG:
        raise ValueError(f"unknown function kind {text!r}; expected one of {sorted(CATALOG)}")
    return text


def _axis(text: str) -> str:
    axis_values(text)
    return text


def _schedule(text: str) -> str:
    schedule_values(text)
    return text


def axis_values(text: str) -> np.ndarray:
    """``start:stop:count`` or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("axis range must be start:stop:count")
        return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
    return np.array(_floats(text))


def schedule_values(text: str) -> np.ndarray:
    """Like :func:`axis_values`, plus ``geom:start:stop:count``."""
    if text.startswith("geom:"):
        parts = text.split(":")[1:]
        if len(parts) != 3:
            raise ValueError("geometric schedule must be geom:start:stop:count")
        return np.geomspace(float(parts[0]), float(parts[1]), int(parts[2]))
    return axis_values(text)


# key -> (parser, default); ``...`` marks a required key
KEYS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "alpha": (_float, ...),
    "beta": (_float, 0.0),
    "gamma": (_float, ...),
    "period": (_opt_float, None),
    "u0.kind": (_kind, "zero"),
    "u0.params": (_floats, ()),
    "g.kind": (_kind, "zero"),
    "g.params": (_floats, ()),
    "f.spatial.kind": (_kind, "zero"),
    "f.spatial.params": (_floats, ()),
    "f.temporal.kind": (_kind, "zero"),
    "f.temporal.params": (_floats, ()),
    "grid.x": (_axis, "0:20:41"),
    "grid.t": (_axis, "0:10:21"),
    "quad.epsilon": (_float, 1e-6),
    "quad.rel_tol": (_float, 1e-9),
    "quad.M": (_opt_float, None),
    "quad.tail": (_choice("contour", "truncate"), "contour"),
    "fd.L": (_float, 40.0),
    "fd.nx": (_int, 2048),
    "fd.dt": (_float, 1e-3),
    "fd.right_bc": (_choice(*RIGHT_BCS), "clamp_to_initial"),
    "picard.dt": (_float, 0.01),
    "picard.tol": (_float, 1e-10),
    "picard.max_iter": (_int, 50),
    "picard.nodes": (_int, 3001),
    "picard.y_max": (_opt_float, None),
    "solve.method": (_choice(*SOLVE_METHODS), "semianalytic"),
    "solve.boundary_flux": (_bool, False),
    "study.x": (_float, 1.0),
    "study.t": (_schedule, "geom:10:1000:8"),
    "study.window": (_opt_float, None),
    "study.compare": (_bool, True),
    "asym.segments": (_words, ("I2", "I4")),
    "asym.x": (_floats, (0.0, 1.0, 5.0)),
    "asym.t": (_floats, (100.0, 1000.0, 10000.0)),
    "asym.convention": (_choice("taylor", "doubled"), "taylor"),
    "compare.methods": (_words, ("semianalytic", "fd", "integral_equation")),
    "transform.x_max": (_float, 10.0),
    "transform.samples": (_int, 64),
}


def _suggest(key: str) -> str:
    close = difflib.get_close_matches(key, KEYS, n=1)
    return f"; did you mean {close[0]!r}?" if close else ""


def _parse_value(key: str, text: str, line: int | None) -> Any:
    if key not in KEYS:
        raise ConfigParseError(f"unknown key {key!r}{_suggest(key)}", line)
    try:
        return KEYS[key][0](text)
    except ValueError as exc:
        raise ConfigParseError(f"bad value for {key}: {exc}", line) from None


def parse_text(text: str) -> dict[str, Any]:
    """Parse configuration text into a ``{key: value}`` mapping (no defaults)."""
    values: dict[str, Any] = {}
    seen: dict[str, int] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(f"expected 'key = value', got {body!r}", n)
        key, value = (p.strip() for p in body.split("=", 1))
        if not key:
            raise ConfigParseError("missing key", n)
        if key in seen:
            raise ConfigParseError(f"duplicate key {key!r} (first set on line {seen[key]})", n)
        seen[key] = n
        values[key] = _parse_value(key, value, n)
    return values


def apply_overrides(values: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    out = dict(values)
    for item in overrides:
        if "=" not in item:
            raise ConfigParseError(f"override must be key=value, got {item!r}")
        key, value = (p.strip() for p in item.split("=", 1))
        out[key] = _parse_value(key, value, None)
    return out


@dataclass
class RunConfig:
    """Problem, discretization and per-command settings."""

    spec: ProblemSpec
    grid: Grid
    quad: QuadratureConfig
    fd: FdConfig
    picard: PicardConfig
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]


def _descriptor(values: dict[str, Any], prefix: str) -> FunctionDescriptor:
    return FunctionDescriptor(values[f"{prefix}.kind"], values[f"{prefix}.params"])


def build(values: dict[str, Any]) -> RunConfig:
    """Fill defaults and construct the typed objects."""
    full = {}
    for key, (_, default) in KEYS.items():
        if key in values:
            full[key] = values[key]
        elif default is ...:
            raise ConfigParseError(f"missing required key {key!r}")
        else:
            full[key] = default
    spec = ProblemSpec(
        alpha=full["alpha"], gamma=full["gamma"],
        u0=_descriptor(full, "u0"), g=_descriptor(full, "g"),
        f=ForcingDescriptor(_descriptor(full, "f.spatial"), _descriptor(full, "f.temporal")),
        beta_nl=full["beta"], period=full["period"],
    )
    grid = Grid(axis_values(full["grid.x"]), axis_values(full["grid.t"]))
    quad = QuadratureConfig(epsilon=full["quad.epsilon"], rel_tol=full["quad.rel_tol"],
                            M=full["quad.M"], tail=full["quad.tail"])
    fd = FdConfig(L=full["fd.L"], nx=full["fd.nx"], dt=full["fd.dt"], right_bc=full["fd.right_bc"])
    picard = PicardConfig(dt=full["picard.dt"], fp_tol=full["picard.tol"],
                          max_iter=full["picard.max_iter"], y_quadrature_nodes=full["picard.nodes"],
                          y_max=full["picard.y_max"])
    return RunConfig(spec, grid, quad, fd, picard, full)


def parse_config(path: str | Path, overrides: list[str] | None = None) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return build(apply_overrides(parse_text(text), overrides or []))


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def serialize(cfg: RunConfig | dict[str, Any]) -> str:
    """Configuration text that parses back to the same values."""
    values = cfg.values if isinstance(cfg, RunConfig) else cfg
    return "".join(f"{key} = {_format(values[key])}\n" for key in KEYS if key in values)
