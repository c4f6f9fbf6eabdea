"""Command-line front end.

Exit codes: 0 ok, 2 bad configuration, 3 numerical non-convergence, 4 I/O.
Data goes to files or stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import io
import logging
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .field import (
    ConfigError,
    GeometryError,
    ModelParams,
    check_n,
    droplet_at_volume,
    energy_gap,
    nu,
    path_point,
)
from .fieldio import FieldFileError, read_field, write_field
from .limit_model import DomainError, LimitParams, solve_extrema
from .optimize import (
    MinimizeConfig,
    ProjectionError,
    barrier_sweep,
    constrained_minimize,
    local_minimize_ball,
)
from .shape import UnsupportedDimension, shape_report
from .steiner import energy_decrease_report, steiner_symmetrize

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("chlandscape")


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        self.code = code
        super().__init__(msg)


@dataclass(frozen=True)
class RunConfig:
    d: int = 2
    xi: float = 1.5
    phi: float = 0.04
    n: int = 256
    seed: int = 0
    out: Optional[str] = None
    report: Optional[str] = None
    omega: Optional[float] = None
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    steps: Optional[int] = None
    levels: int = 33
    max_iter: int = 50_000
    grad_tol: float = 1e-5

    def validate(self, grid: bool = True) -> "RunConfig":
        if self.d < 2:
            raise ConfigError(f"d must be >= 2, got {self.d}")
        if not self.xi > 0:
            raise ConfigError(f"xi must be positive, got {self.xi}")
        if grid:
            ModelParams(self.d, self.xi, self.phi)
            check_n(self.n)
        if self.steps is not None and self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.levels < 3:
            raise ConfigError("levels must be >= 3")
        if self.max_iter < 0 or not self.grad_tol > 0:
            raise ConfigError("max-iter must be >= 0 and grad-tol positive")
        return self

    @property
    def model(self) -> ModelParams:
        return ModelParams(self.d, self.xi, self.phi)

    @property
    def minimize_config(self) -> MinimizeConfig:
        return MinimizeConfig(max_iter=self.max_iter, grad_tol=self.grad_tol, seed=self.seed)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"d": int, "n": int, "seed": int, "steps": int, "levels": int, "max_iter": int,
          "xi": float, "phi": float, "omega": float, "omega_min": float, "omega_max": float,
          "grad_tol": float, "out": str, "report": str}


def parse_config_file(path: str) -> dict:
    """``key=value`` per line, ``#`` comments; keys may use '-' or '_'."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config file: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CASTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in _CASTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


def _check_writable(path: Optional[str]) -> None:
    if path is None:
        return
    p = Path(path)
    parent = p.parent if str(p.parent) else Path(".")
    if p.is_dir() or not parent.is_dir() or not os.access(parent, os.W_OK):
        raise CliError(EXIT_IO, f"cannot write to {path}")


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _write_field(path: str, f) -> None:
    try:
        write_field(path, f)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _read_field(path: str):
    try:
        return read_field(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None
    except FieldFileError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from None


def _extrema(cfg: RunConfig):
    land = solve_extrema(LimitParams(cfg.d, cfg.xi))
    if land.extrema is None:
        raise ConfigError(f"xi={cfg.xi} <= xi_tilde={land.xi_tilde:.6g}: f_xi has no positive extrema")
    return land.extrema


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


# --------------------------------------------------------------------------
# subcommands


def cmd_constants(cfg: RunConfig) -> int:
    cfg.validate(grid=False)
    land = solve_extrema(LimitParams(cfg.d, cfg.xi))
    ex = land.extrema
    cols = ["d", "xi", "c0", "sigma_d", "c1_bar", "xi_tilde", "xi_d",
            "nu_s", "nu_m", "c_s", "c_m", "gamma0"]
    row = [str(cfg.d), _fmt(cfg.xi), _fmt(land.c0), _fmt(land.sigma_d), _fmt(land.c1_bar),
           _fmt(land.xi_tilde), _fmt(land.xi_d)]
    if ex is None:
        row += [""] * 5
    else:
        row += [_fmt(ex.nu_s), _fmt(ex.nu_m), _fmt(ex.c_s), _fmt(ex.c_m), _fmt(ex.gamma0)]
    _write_text(cfg.out, ",".join(cols) + "\n" + ",".join(row) + "\n")
    return EXIT_OK


def cmd_minimize(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.out is None:
        raise ConfigError("minimize needs --out")
    _check_writable(cfg.out)
    _check_writable(cfg.report)
    p = cfg.model
    omega = cfg.omega if cfg.omega is not None else _extrema(cfg).nu_m
    init = droplet_at_volume(omega, p, cfg.n)
    res = constrained_minimize(omega, init, cfg.minimize_config)
    _write_field(cfg.out, res.field)
    _write_text(cfg.report, res.report_csv())
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_localmin(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.out is None:
        raise ConfigError("localmin needs --out")
    _check_writable(cfg.out)
    _check_writable(cfg.report)
    res = local_minimize_ball(cfg.model, cfg.n, cfg.minimize_config)
    _write_field(cfg.out, res.field)
    text = res.report_csv().splitlines()
    text[0] += ",ball_distance,nu"
    text[1] += f",{res.ball_distance!r},{nu(res.field)!r}"
    _write_text(cfg.report, "\n".join(text) + "\n")
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_sweep(cfg: RunConfig) -> int:
    cfg.validate()
    _check_writable(cfg.out)
    lo = cfg.omega_min if cfg.omega_min is not None else 0.0
    hi = cfg.omega_max if cfg.omega_max is not None else _extrema(cfg).nu_m
    steps = cfg.steps if cfg.steps is not None else 25
    if hi < lo:
        raise ConfigError("omega-max must be >= omega-min")
    grid = np.linspace(lo, hi, steps) if steps > 1 else np.array([hi])
    curve = barrier_sweep(grid, cfg.model, cfg.n, cfg.minimize_config)
    _write_text(cfg.out, curve.to_csv())
    return EXIT_OK if all(s.converged for s in curve.samples) else EXIT_NUMERIC


def cmd_path(cfg: RunConfig) -> int:
    cfg.validate()
    _check_writable(cfg.out)
    ex = None
    if cfg.omega_min is None or cfg.omega_max is None:
        ex = _extrema(cfg)
    w1 = cfg.omega_min if cfg.omega_min is not None else 0.1 * ex.nu_s
    w2 = cfg.omega_max if cfg.omega_max is not None else ex.nu_m
    steps = cfg.steps if cfg.steps is not None else 50
    p = cfg.model
    buf = io.StringIO(newline="")
    buf.write("t,omega,nu,energy\n")
    top = -math.inf
    for t in np.linspace(0.0, 1.0, max(steps, 2)):
        f = path_point(float(t), w1, w2, p, cfg.n)
        om = w1 if t <= 0.2 else w1 + (t - 0.2) / 0.8 * (w2 - w1)
        e = energy_gap(f)
        top = max(top, e)
        buf.write(f"{float(t)!r},{float(om)!r},{nu(f)!r},{e!r}\n")
    buf.write(f"# max_energy={top!r}\n")
    _write_text(cfg.out, buf.getvalue())
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig, source: str) -> int:
    cfg.validate(grid=False)
    _check_writable(cfg.out)
    f = _read_field(source)
    rep = shape_report(f, cfg.levels)
    _write_text(cfg.out, rep.to_csv())
    return EXIT_OK


def cmd_symmetrize(cfg: RunConfig, source: str) -> int:
    cfg.validate(grid=False)
    if cfg.out is None:
        raise ConfigError("symmetrize needs --out")
    _check_writable(cfg.out)
    _check_writable(cfg.report)
    f = _read_field(source)
    _write_field(cfg.out, steiner_symmetrize(f))
    _write_text(cfg.report, energy_decrease_report(f).to_csv())
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file (flags override it)")
    common.add_argument("--d", type=int)
    common.add_argument("--xi", type=float)
    common.add_argument("--phi", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--report")
    common.add_argument("--omega", type=float)
    common.add_argument("--omega-min", dest="omega_min", type=float)
    common.add_argument("--omega-max", dest="omega_max", type=float)
    common.add_argument("--steps", type=int)
    common.add_argument("--levels", type=int)
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--grad-tol", dest="grad_tol", type=float)

    parser = argparse.ArgumentParser(prog="chlandscape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="limit-model constants as CSV")
    sub.add_parser("minimize", parents=[common], help="volume-constrained minimizer")
    sub.add_parser("sweep", parents=[common], help="barrier sweep over omega")
    sub.add_parser("path", parents=[common], help="energy along the nucleation path")
    sub.add_parser("localmin", parents=[common], help="local minimizer in the gamma0-ball")
    for name, helptext in (("diagnose", "shape report of a field file"),
                           ("symmetrize", "Steiner-symmetrize a field file")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("input", help="field file")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        cmd = args.command
        if cmd == "constants":
            return cmd_constants(cfg)
        if cmd == "minimize":
            return cmd_minimize(cfg)
        if cmd == "localmin":
            return cmd_localmin(cfg)
        if cmd == "sweep":
            return cmd_sweep(cfg)
        if cmd == "path":
            return cmd_path(cfg)
        if cmd == "diagnose":
            return cmd_diagnose(cfg, args.input)
        if cmd == "symmetrize":
            return cmd_symmetrize(cfg, args.input)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, DomainError, GeometryError, UnsupportedDimension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    parser.error(f"unknown command {args.command}")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
