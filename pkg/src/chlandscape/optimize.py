"""Energy minimization under the mean and volume constraints.

Iterates stay feasible: each trial step along the negative projected gradient
is pulled back onto {mean u = -1+phi, nu(u) = omega} by a two-scalar Newton
solve, and accepted by a monotone Armijo test on the energy gap. The trial
step length is the Barzilai-Borwein ratio of the last two iterates (capped by
``initial_step``); backtracking halves it until Armijo holds.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .field import (
    ConfigError,
    Field,
    ModelParams,
    droplet,
    droplet_at_volume,
    l2_dist_mod_translation,
    make_sharp_profile,
    SharpProfile,
    uniform_field,
)
from .limit_model import LimitParams, solve_extrema

log = logging.getLogger(__name__)


class ProjectionError(RuntimeError):
    """Newton projection onto the constraint set did not converge."""


@dataclass(frozen=True)
class MinimizeConfig:
    max_iter: int = 50_000
    grad_tol: float = 1e-5
    constraint_tol: float = 1e-10
    shrink: float = 0.5
    armijo: float = 1e-4
    initial_step: float = 1.0
    seed: int = 0
    min_step: float = 1e-13

    def __post_init__(self):
        if self.max_iter < 0:
            raise ConfigError("max_iter must be >= 0")
        for name in ("grad_tol", "constraint_tol", "armijo", "initial_step", "min_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigError("shrink must lie in (0, 1)")


@dataclass(eq=False)
class ConstrainedResult:
    field: Field
    energy: float
    lambda_phi: float
    lambda_omega: float
    el_residual: float
    iterations: int
    converged: bool
    omega: Optional[float] = None
    history: list = dc_field(default_factory=list)
    ball_distance: Optional[float] = None

    def report_csv(self) -> str:
        keys = ("energy", "lambda_phi", "lambda_omega", "el_residual", "iterations", "converged")
        vals = [repr(float(getattr(self, k))) for k in keys[:4]]
        vals += [str(self.iterations), "true" if self.converged else "false"]
        return ",".join(keys) + "\n" + ",".join(vals) + "\n"


# --------------------------------------------------------------------------
# constraints


def _mean(u: np.ndarray) -> float:
    return float(u.mean())


def project_constraints(
    f: Field, omega: float, tol: float = 1e-10, max_newton: int = 50
) -> Field:
    """Return f + a + b*chi3'(f) with mean -1+phi and nu = omega.

    (a, b) solve the two constraint equations by Newton's method; a singular
    Jacobian falls back to the least-squares step, and every step is halved
    until the residual norm decreases.
    """
    p = f.params
    vmax = p.xi ** (p.d + 1) / 2.0
    if not 0.0 <= omega <= vmax:
        raise ConfigError(f"omega must lie in [0, {vmax:.6g}], got {omega}")
    u0 = f.values
    hd = f.cell_volume
    kap = p.kappa
    w = kernels.chi3_prime(u0, kap)
    wbar = _mean(w)

    def residual(a, b):
        u = u0 + a + b * w if b != 0.0 else u0 + a
        s0, s1, s2 = kernels.chi3_moments(u, w, kap)
        return np.array([_mean(u) - p.mean, s0 * hd - omega]), s1 * hd, s2 * hd

    a = b = 0.0
    r, s1, s2 = residual(a, b)
    if np.all(np.abs(r) <= tol):
        return f
    for _ in range(max_newton):
        jac = np.array([[1.0, wbar], [s1, s2]])
        try:
            if abs(np.linalg.det(jac)) < 1e-14 * max(1.0, np.abs(jac).max() ** 2):
                raise np.linalg.LinAlgError
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        norm = float(np.hypot(*r))
        t = 1.0
        for _ in range(40):
            r_new, s1_new, s2_new = residual(a + t * step[0], b + t * step[1])
            if float(np.hypot(*r_new)) < norm:
                break
            t *= 0.5
        else:
            break
        a += t * step[0]
        b += t * step[1]
        r, s1, s2 = r_new, s1_new, s2_new
        if np.all(np.abs(r) <= tol):
            return f.with_values(u0 + a + b * w)
    raise ProjectionError(f"projection to nu={omega} failed (residual {r})")


def _tangent(g: np.ndarray, w: Optional[np.ndarray]):
    """Remove the L2 components of g along 1 (and w); return (g_T, coefficients)."""
    if w is None:
        c1 = _mean(g)
        return g - c1, (c1, 0.0)
    n = g.size
    sw = float(w.sum())
    gram = np.array([[float(n), sw], [sw, float(np.dot(w.ravel(), w.ravel()))]])
    rhs = np.array([float(g.sum()), float(np.dot(w.ravel(), g.ravel()))])
    if gram[1, 1] * n - sw * sw <= 1e-12 * gram[1, 1] * n:
        c1 = rhs[0] / n
        return g - c1, (c1, 0.0)
    c = np.linalg.solve(gram, rhs)
    return g - c[0] - c[1] * w, (float(c[0]), float(c[1]))


def _gprime_m_over_phi(p: ModelParams) -> float:
    m = p.mean
    return -m * (1.0 - m * m) / p.phi


def el_residual(f: Field, lambda_phi: float, lambda_omega: float) -> float:
    """sup |-phi Lap u + G'(u)/phi + lambda_phi + lambda_omega chi3'(u)|."""
    p = f.params
    g = kernels.energy_gradient(f.values, p.phi, f.h) + _gprime_m_over_phi(p)
    r = g + lambda_phi
    if lambda_omega != 0.0:
        r = r + lambda_omega * kernels.chi3_prime(f.values, p.kappa)
    return float(np.max(np.abs(r)))


# --------------------------------------------------------------------------
# descent


def _descend(u, params, h, cfg, project, use_volume, accept_extra=None):
    """Shared projected-gradient loop. Returns (u, E, coeffs, gT, iters, converged, history)."""
    phi = params.phi
    kap = params.kappa
    hd = h**params.d

    def tangent(v):
        g = kernels.energy_gradient(v, phi, h)
        w = kernels.chi3_prime(v, kap) if use_volume else None
        return _tangent(g, w)

    energy = kernels.energy_gap(u, phi, h)
    gT, coeffs = tangent(u)
    history = [energy]
    step0 = cfg.initial_step
    converged = False
    it = 0
    while True:
        res = float(np.max(np.abs(gT)))
        if res <= cfg.grad_tol:
            converged = True
            break
        if it >= cfg.max_iter:
            break
        slope = hd * float(np.dot(gT.ravel(), gT.ravel()))
        t = step0
        accepted = None
        while t >= cfg.min_step:
            trial = u - t * gT
            try:
                trial = project(trial)
            except ProjectionError:
                t *= cfg.shrink
                continue
            e_trial = kernels.energy_gap(trial, phi, h)
            if e_trial <= energy - cfg.armijo * t * slope and (
                accept_extra is None or accept_extra(u, trial)
            ):
                accepted = trial
                break
            t *= cfg.shrink
        if accepted is None:
            log.info("line search stalled at iteration %d (residual %.3e)", it, res)
            break
        it += 1
        gT_new, coeffs = tangent(accepted)
        s = accepted - u
        y = gT_new - gT
        sy = float(np.dot(s.ravel(), y.ravel()))
        if sy > 0.0:
            step0 = min(float(np.dot(s.ravel(), s.ravel())) / sy, cfg.initial_step)
        else:
            step0 = cfg.initial_step
        u, gT, energy = accepted, gT_new, e_trial
        history.append(energy)
    return u, energy, coeffs, gT, it, converged, history


def constrained_minimize(
    omega: float, init: Field, cfg: MinimizeConfig = MinimizeConfig()
) -> ConstrainedResult:
    """Minimize the energy gap over {mean u = -1+phi, nu(u) = omega} starting from ``init``.

    Non-convergence within ``cfg.max_iter`` is reported through
    ``converged=False``; a failed projection raises :class:`ProjectionError`.
    """
    p = init.params
    start = project_constraints(init, omega, cfg.constraint_tol)

    def project(v):
        return project_constraints(start.with_values(v), omega, cfg.constraint_tol).values

    u, energy, (c1, c2), gT, iters, conv, hist = _descend(
        start.values, p, start.h, cfg, project, use_volume=True
    )
    lam_phi = -(_gprime_m_over_phi(p) + c1)
    lam_omega = -c2
    out = start.with_values(u)
    return ConstrainedResult(
        field=out,
        energy=energy,
        lambda_phi=lam_phi,
        lambda_omega=lam_omega,
        el_residual=el_residual(out, lam_phi, lam_omega),
        iterations=iters,
        converged=conv,
        omega=omega,
        history=hist,
    )


def local_minimize_ball(
    p: ModelParams, n: int, cfg: MinimizeConfig = MinimizeConfig()
) -> ConstrainedResult:
    """Local minimizer near the sharp droplet of volume nu_m, mean constraint only.

    Starts from ``droplet(nu_m)``; a trial step that would leave the ball
    ``dist_mod_translation(u, Psi_m) <= gamma0`` is shrunk like an Armijo
    rejection.
    """
    land = solve_extrema(LimitParams(p.d, p.xi))
    if land.extrema is None or not land.xi_tilde < p.xi <= land.xi_d:
        raise ConfigError("local minimizer needs xi in (xi_tilde, xi_d]")
    ex = land.extrema
    init = droplet(ex.nu_m, p, n)
    psi = make_sharp_profile(SharpProfile(ex.nu_m), p, n)
    gamma0 = ex.gamma0
    dist0, _ = l2_dist_mod_translation(init, psi)
    if dist0 > gamma0:
        raise ConfigError(f"initial droplet lies outside the ball ({dist0:.4g} > {gamma0:.4g})")
    hd = init.cell_volume
    state = {"dist": dist0}

    def project(v):
        return v + (p.mean - _mean(v))

    def inside_ball(u_old, trial):
        move = math.sqrt(hd * float(np.sum((trial - u_old) ** 2)))
        if state["dist"] + move <= gamma0:
            state["dist"] = state["dist"] + move  # upper bound, refreshed lazily
            return True
        dist, _ = l2_dist_mod_translation(init.with_values(trial), psi)
        if dist <= gamma0:
            state["dist"] = dist
            return True
        return False

    u, energy, (c1, _), gT, iters, conv, hist = _descend(
        init.values, p, init.h, cfg, project, use_volume=False, accept_extra=inside_ball
    )
    out = init.with_values(u)
    lam_phi = -(_gprime_m_over_phi(p) + c1)
    dist, _ = l2_dist_mod_translation(out, psi)
    return ConstrainedResult(
        field=out,
        energy=energy,
        lambda_phi=lam_phi,
        lambda_omega=0.0,
        el_residual=el_residual(out, lam_phi, 0.0),
        iterations=iters,
        converged=conv,
        history=hist,
        ball_distance=dist,
    )


# --------------------------------------------------------------------------
# barrier sweep


@dataclass(frozen=True)
class BarrierSample:
    omega: float
    energy: float
    converged: bool


@dataclass
class BarrierCurve:
    samples: list
    omega_star: float
    delta_e_omega: float
    results: list = dc_field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        out = io.StringIO(newline="")
        out.write("omega,energy,converged\n")
        for s in self.samples:
            out.write(f"{s.omega!r},{s.energy!r},{'true' if s.converged else 'false'}\n")
        out.write(f"# omega_star={self.omega_star!r}\n")
        out.write(f"# delta_e_omega={self.delta_e_omega!r}\n")
        return out.getvalue()


def barrier_sweep(
    omega_grid: Sequence[float],
    p: ModelParams,
    n: int,
    cfg: MinimizeConfig = MinimizeConfig(),
    cold_start: bool = False,
    keep_fields: bool = False,
) -> BarrierCurve:
    """Constrained minima along an ascending volume grid and the resulting barrier.

    Each sample is warm-started from the previous minimizer (or from
    ``droplet_at_volume(omega)`` in cold-start mode, or when there is no usable previous
    field). Failed samples are recorded with ``converged=False``.
    """
    grid = [float(w) for w in omega_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ConfigError("omega grid must be ascending")
    vmax = p.xi ** (p.d + 1) / 2.0
    if grid and (grid[0] < 0 or grid[-1] > vmax):
        raise ConfigError("omega grid outside [0, xi^(d+1)/2]")
    samples, results = [], []
    prev: Optional[Field] = None
    for omega in grid:
        if omega == 0.0:
            inits = [uniform_field(p, n)]
        elif cold_start or prev is None:
            inits = [droplet_at_volume(omega, p, n)]
        else:
            inits = [prev, droplet_at_volume(omega, p, n)]
        res = None
        for init in inits:
            try:
                res = constrained_minimize(omega, init, cfg)
                break
            except ProjectionError as exc:
                log.info("omega=%.6g: %s", omega, exc)
        if res is None:
            samples.append(BarrierSample(omega, float("nan"), False))
            results.append(None)
            continue
        log.info("omega=%.6g energy=%.6g iters=%d converged=%s", omega, res.energy, res.iterations, res.converged)
        samples.append(BarrierSample(omega, res.energy, res.converged))
        results.append(res if keep_fields else None)
        if omega > 0.0:
            prev = res.field
    good = [s for s in samples if s.converged]
    if good:
        top = max(good, key=lambda s: s.energy)
        omega_star, delta = top.omega, top.energy
    else:
        omega_star, delta = float("nan"), float("nan")
    return BarrierCurve(samples, omega_star, delta, results)
