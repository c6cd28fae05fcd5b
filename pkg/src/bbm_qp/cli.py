"""Command-line front end.

Exit codes: 0 success, 1 invalid configuration, 2 accuracy failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import ASYMPTOTIC_COLUMNS, asymptotic_vs_quadrature
from .config import RunConfig, parse_config, schedule_values, serialize
from .errors import AccuracyError, BBMError, ConfigurationError
from .halfline import default_xi_grid, invert, plancherel_defect, transform
from .kernels import phi_field
from .periodicity import PERIODICITY_COLUMNS, periodicity_study
from .problem import FunctionDescriptor, validate
from .reference import fd_solve, integral_equation_solve
from .semianalytic import SolutionField, solve_field, transport_solution

COMMANDS = ("solve", "kernel", "asymptotics", "periodicity", "compare", "transform-check")
EXIT_OK, EXIT_CONFIG, EXIT_ACCURACY, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    config_path: Path
    output_dir: Path
    seed: int = 0
    overrides: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        self.config_path = Path(self.config_path)
        self.output_dir = Path(self.output_dir)


@dataclass
class _Result:
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]]
    achieved: dict[str, float]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, columns, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _require_valid(cfg: RunConfig) -> None:
    problems = validate(cfg.spec)
    if problems:
        raise ConfigurationError("; ".join(problems))


def _solve(cfg: RunConfig, method: str) -> SolutionField:
    spec, grid = cfg.spec, cfg.grid
    if method == "semianalytic":
        return solve_field(spec, grid, cfg.quad, boundary_flux=cfg["solve.boundary_flux"])
    if method == "fd":
        return fd_solve(spec, cfg.fd, grid)
    if method == "integral_equation":
        return integral_equation_solve(spec, cfg.picard, grid)
    if method == "transport":
        X, T = np.meshgrid(grid.x_values, grid.t_values, indexing="ij")
        return SolutionField(grid, transport_solution(spec, X, T), spec, "transport_closed_form")
    raise ConfigurationError(f"unknown method {method!r}")


def cmd_solve(cfg: RunConfig, seed: int) -> _Result:
    if cfg["solve.method"] != "transport":
        _require_valid(cfg)
    sol = _solve(cfg, cfg["solve.method"])
    g = cfg.spec.g(cfg.grid.t_values)
    achieved = {}
    if cfg.grid.x_values[0] == 0.0:
        achieved["boundary_defect"] = float(np.max(np.abs(sol.u_values[0] - g)))
    if "quad_error" in sol.info:
        achieved["quadrature_error_estimate"] = float(sol.info["quad_error"])
    return _Result({"solution.csv": (("x", "t", "u", "method"), list(sol.rows()))}, achieved)


def cmd_kernel(cfg: RunConfig, seed: int) -> _Result:
    kf = phi_field(cfg.grid, cfg.spec.alpha, cfg.spec.gamma, cfg.quad)
    return _Result({"kernel.csv": (("x", "t", "phi"), list(kf.to_rows()))},
                   {"quad.rel_tol": cfg.quad.rel_tol})


def cmd_asymptotics(cfg: RunConfig, seed: int) -> _Result:
    a, c = cfg.spec.alpha, cfg.spec.gamma
    if a == 0:
        raise ConfigurationError("stationary phase undefined for alpha = 0")
    rows = []
    worst = 0.0
    for seg, x, t in itertools.product(cfg["asym.segments"], cfg["asym.x"], cfg["asym.t"]):
        res = asymptotic_vs_quadrature(seg, a, c, x, t, cfg.quad, convention=cfg["asym.convention"])
        rows.append(res.row())
        if math.isfinite(res.rel_err):
            worst = max(worst, res.rel_err)
    return _Result({"asymptotics.csv": (ASYMPTOTIC_COLUMNS, rows)}, {"max_rel_err": worst})


def cmd_periodicity(cfg: RunConfig, seed: int) -> _Result:
    _require_valid(cfg)
    ts = schedule_values(cfg["study.t"])
    rep = periodicity_study(cfg.spec, cfg["study.x"], ts, "semianalytic", cfg.quad,
                            window=cfg["study.window"], compare=cfg["study.compare"])
    tables = {"periodicity.csv": (PERIODICITY_COLUMNS, list(rep.rows()))}
    achieved = {"slope": rep.fit.slope, "fit_residual": rep.fit.residual,
                "bound_constant": rep.bound_constant}
    if rep.defect_repr is not None:
        achieved["max_route_gap"] = float(np.max(np.abs(rep.extra["signed"] - rep.defect_repr)))
    if rep.window_sup is not None:
        tables["periodicity_window.csv"] = (
            ("x", "t", "window_sup"), [(rep.x, t, s) for t, s in zip(rep.t_samples, rep.window_sup)]
        )
    return _Result(tables, achieved)


def cmd_compare(cfg: RunConfig, seed: int) -> _Result:
    _require_valid(cfg)
    fields = {m: _solve(cfg, m) for m in cfg["compare.methods"]}
    rows = []
    for a, b in itertools.combinations(fields, 2):
        rows.append((a, b, float(np.max(np.abs(fields[a].u_values - fields[b].u_values)))))
    sol_rows = [row for f in fields.values() for row in f.rows()]
    achieved = {f"{a}|{b}": d for a, b, d in rows}
    return _Result({"compare.csv": (("method_a", "method_b", "sup_distance"), rows),
                    "fields.csv": (("x", "t", "u", "method"), sol_rows)}, achieved)


SAMPLE_FUNCTIONS = (
    FunctionDescriptor.gaussian(1.0, 3.0, 0.5),
    FunctionDescriptor.exp_decay(1.0, 1.0),
    FunctionDescriptor.poly_exp(0.0, 1.0, -0.5, 0.1, 1.0),
)


def cmd_transform_check(cfg: RunConfig, seed: int) -> _Result:
    funcs = [d for d in (cfg.spec.u0, cfg.spec.f.spatial) if not d.is_zero] or list(SAMPLE_FUNCTIONS)
    x_max = cfg["transform.x_max"]
    rng = np.random.default_rng(seed)
    xs = np.sort(np.concatenate([np.linspace(0.0, x_max, 11),
                                 rng.uniform(0.0, x_max, cfg["transform.samples"])]))
    rows = []
    worst_rt = worst_pl = 0.0
    for d in funcs:
        samples = transform(d, default_xi_grid(d, x_max))
        rt = max(abs(invert(samples, x) - d(x)) for x in xs if x > 0)
        pl = plancherel_defect(d)
        worst_rt, worst_pl = max(worst_rt, rt), max(worst_pl, pl)
        rows.append((d.kind, ";".join(repr(p) for p in d.params), rt, pl))
    return _Result({"transform.csv": (("kind", "params", "roundtrip_err", "plancherel_defect"), rows)},
                   {"roundtrip_err": worst_rt, "plancherel_defect": worst_pl})


HANDLERS = {
    "solve": cmd_solve,
    "kernel": cmd_kernel,
    "asymptotics": cmd_asymptotics,
    "periodicity": cmd_periodicity,
    "compare": cmd_compare,
    "transform-check": cmd_transform_check,
}


def _summary(manifest: RunManifest, cfg: RunConfig, result: _Result, wall: float, notes: list[str]) -> str:
    lines = [f"command: {manifest.command}", f"config: {manifest.config_path}",
             f"seed: {manifest.seed}", f"wall_time_s: {wall:.3f}", "", "[achieved]"]
    lines += [f"{k}: {_fmt(v)}" for k, v in result.achieved.items()]
    lines += ["", "[columns]"]
    lines += [f"{name}: {', '.join(cols)}" for name, (cols, _) in result.tables.items()]
    if notes:
        lines += ["", "[warnings]"] + notes
    lines += ["", "[parameters]", serialize(cfg).rstrip()]
    return "\n".join(lines) + "\n"


def run(manifest: RunManifest) -> int:
    """Execute one command and write its artifacts. Returns the exit code."""
    try:
        cfg = parse_config(manifest.config_path, manifest.overrides)
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = HANDLERS[manifest.command](cfg, manifest.seed)
    except ConfigurationError as exc:
        print(f"error [validation]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as exc:
        print(f"error [accuracy]: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except BBMError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    wall = time.perf_counter() - start
    notes = [str(w.message) for w in caught]
    try:
        manifest.output_dir.mkdir(parents=True, exist_ok=True)
        for name, (cols, rows) in result.tables.items():
            _write_csv(manifest.output_dir / name, cols, rows)
        (manifest.output_dir / "summary.txt").write_text(
            _summary(manifest, cfg, result, wall, notes), encoding="utf-8")
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bbm-qp", description="Quarter-plane BBM solvers and studies")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="flat key = value configuration file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (repeatable)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    manifest = RunManifest(args.command, args.config, args.out, args.seed, args.overrides)
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
