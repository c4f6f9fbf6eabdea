"""Periodic grid fields on the rescaled torus and the energy-gap functional.

The torus has side ``ell = xi**((d+1)/d) * phi**(-1/d)`` so that
``phi * ell**d == xi**(d+1)``. Cell ``i`` along an axis sits at ``x = i*h``;
the origin is the centre of cell 0 and coordinates are taken modulo ``ell``.
Arrays have shape ``(n,) * d`` with axis 0 the x-direction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .limit_model import sphere_area

N_MIN, N_MAX = 32, 1024
DEFAULT_CUTOFF = 8.0


class ConfigError(ValueError):
    """Invalid model or grid parameters."""


class GeometryError(ValueError):
    """A requested shape does not fit in the torus."""


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class ModelParams:
    d: int
    xi: float
    phi: float

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ConfigError(f"grids support d in {{2, 3}}, got {self.d!r}")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise ConfigError(f"xi must be positive, got {self.xi!r}")
        if not (0.0 < self.phi <= 0.25):
            raise ConfigError(f"phi must lie in (0, 0.25], got {self.phi!r}")

    @property
    def kappa(self) -> float:
        return self.phi ** (1.0 / 3.0)

    @property
    def mean(self) -> float:
        return -1.0 + self.phi

    @property
    def ell(self) -> float:
        return self.xi ** ((self.d + 1.0) / self.d) * self.phi ** (-1.0 / self.d)

    @property
    def volume(self) -> float:
        """Torus volume ell**d (equals xi**(d+1) / phi)."""
        return self.ell**self.d


def check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not _is_pow2(int(n)) or not N_MIN <= n <= N_MAX:
        raise ConfigError(f"n must be a power of two in [{N_MIN}, {N_MAX}], got {n!r}")
    return int(n)


@dataclass(frozen=True, eq=False)
class Field:
    params: ModelParams
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        p = self.params
        if v.ndim != p.d or len(set(v.shape)) != 1:
            raise ConfigError(f"values must have shape (n,)*{p.d}, got {v.shape}")
        check_n(v.shape[0])
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return self.params.ell / self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.params.d

    def mean(self) -> float:
        """Correctly rounded sum over the cells; exact for constant fields."""
        return math.fsum(self.values.ravel()) / self.values.size

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.params, np.ascontiguousarray(values, dtype=np.float64))


def uniform_field(p: ModelParams, n: int) -> Field:
    n = check_n(n)
    return Field(p, np.full((n,) * p.d, p.mean))


def chi_partition(t, kappa: float):
    """Partition of unity (chi1, chi2, chi3) with bands set by ``kappa``.

    chi1 = 1 below -1+kappa and 0 above -1+2*kappa; chi3 = 0 below 1-2*kappa and
    1 above 1-kappa; transitions are cubic smoothsteps. When the two transition
    bands overlap (kappa > 1/2), chi1 is capped at 1 - chi3 so chi2 stays >= 0.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    t = np.asarray(t, dtype=float)
    c3 = kernels.chi3(t, kappa)
    x1 = np.clip((t - (-1.0 + kappa)) / kappa, 0.0, 1.0)
    c1 = np.minimum(1.0 - x1 * x1 * (3.0 - 2.0 * x1), 1.0 - c3)
    c2 = (1.0 - c3) - c1  # >= 0 because c1 <= 1 - c3
    if t.ndim == 0:
        return float(c1), float(c2), float(c3)
    return c1, c2, c3


def nu(f: Field) -> float:
    """Volume functional: h^d * sum chi3(u).

    The sum is correctly rounded, so it is invariant under any permutation of
    the cells. Inner loops use the faster kernel sum instead.
    """
    return math.fsum(kernels.chi3(f.values, f.params.kappa).ravel()) * f.cell_volume


def energy_gap(f: Field) -> float:
    return kernels.energy_gap(f.values, f.params.phi, f.h)


def energy_gradient(f: Field) -> Field:
    """Per-cell L2 gradient of :func:`energy_gap` (divide out the cell volume)."""
    return f.with_values(kernels.energy_gradient(f.values, f.params.phi, f.h))


def dirichlet_integral(f: Field) -> float:
    """h^d * sum |grad_h u|^2 with the same forward differences as the energy."""
    return kernels.dirichlet(f.values, f.h)


def potential_term(f: Field) -> float:
    """h^d * sum of the potential part of the energy density (no gradient term)."""
    w = kernels.potential_gap(f.values, f.params.mean)
    return math.fsum(w.ravel()) * f.cell_volume / f.params.phi


def periodic_offsets(p: ModelParams, n: int, center: Optional[Sequence[float]] = None):
    """Per-axis periodic displacements of the cell centres from ``center``.

    Returns a list of ``d`` broadcastable arrays with values in [-ell/2, ell/2).
    """
    ell = p.ell
    h = ell / n
    if center is None:
        center = (0.0,) * p.d
    if len(center) != p.d:
        raise ConfigError(f"center must have {p.d} components")
    offs = []
    for ax in range(p.d):
        x = np.arange(n) * h - center[ax]
        x = (x + 0.5 * ell) % ell - 0.5 * ell
        shape = [1] * p.d
        shape[ax] = n
        offs.append(x.reshape(shape))
    return offs


def periodic_radius(p: ModelParams, n: int, center: Optional[Sequence[float]] = None) -> np.ndarray:
    offs = periodic_offsets(p, n, center)
    r2 = sum(o * o for o in offs)
    return np.sqrt(r2)


def ball_radius(omega: float, d: int) -> float:
    return (omega * d / sphere_area(d)) ** (1.0 / d)


@dataclass(frozen=True)
class SharpProfile:
    omega: float
    center: Optional[tuple] = None


def make_sharp_profile(sp: SharpProfile, p: ModelParams, n: int) -> Field:
    """+1 on cells whose centre lies in the periodic ball of volume ``omega``, -1 elsewhere."""
    n = check_n(n)
    if sp.omega < 0:
        raise GeometryError("omega must be nonnegative")
    r = ball_radius(sp.omega, p.d)
    if r > 0.5 * p.ell:
        raise GeometryError(f"ball of volume {sp.omega} (radius {r:.4g}) exceeds the inscribed ball")
    if sp.omega == 0:
        return Field(p, np.full((n,) * p.d, -1.0))
    dist = periodic_radius(p, n, sp.center)
    return Field(p, np.where(dist <= r, 1.0, -1.0))


def profile_v(s: np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Odd, monotone front profile: -tanh(s/sqrt 2) for |s| < R, -sgn(s) beyond 2R.

    On R <= |s| <= 2R the tanh tail is tapered to its limit by a smoothstep
    factor, which keeps the profile C^1 and monotone.
    """
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    tail = 1.0 - np.tanh(a / math.sqrt(2.0))
    x = np.clip((a - cutoff) / cutoff, 0.0, 1.0)
    taper = 1.0 - x * x * (3.0 - 2.0 * x)
    mag = 1.0 - tail * taper
    return -np.sign(s) * mag


def _droplet_values(r_hat, p, n, cutoff, center):
    if r_hat + 2.0 * cutoff * p.phi > 0.5 * p.ell:
        raise GeometryError("droplet with its interface layer does not fit in the torus")
    dist = periodic_radius(p, n, center)
    v = profile_v((dist - r_hat) / p.phi, cutoff)
    # the mean is affine in the shift, so the shift is exact up to rounding
    alpha = p.mean - float(v.mean())
    return v + alpha


def droplet(
    omega: float,
    p: ModelParams,
    n: int,
    cutoff: float = DEFAULT_CUTOFF,
    center: Optional[Sequence[float]] = None,
) -> Field:
    """Diffuse droplet of nominal volume ``omega`` with mean exactly -1+phi.

    ``cutoff`` is the profile cut-off R in interface units; the physical
    interface half-width is ``2*R*phi``.
    """
    n = check_n(n)
    vmax = p.xi ** (p.d + 1) / 2.0
    if not 0.0 < omega <= vmax:
        raise GeometryError(f"omega must lie in (0, {vmax:.6g}], got {omega}")
    return Field(p, _droplet_values(ball_radius(omega, p.d), p, n, cutoff, center))


def droplet_at_volume(
    omega: float,
    p: ModelParams,
    n: int,
    cutoff: float = DEFAULT_CUTOFF,
    center: Optional[Sequence[float]] = None,
    tol: float = 1e-12,
) -> Field:
    """Droplet whose radius is tuned by bisection so that ``nu(u) == omega``.

    The plain :func:`droplet` undershoots its nominal volume by O(phi |ln phi|);
    this variant removes that offset and is the preferred starting point for
    volume-constrained minimization.
    """
    n = check_n(n)
    if not omega > 0.0:
        raise GeometryError("omega must be positive")
    hd = (p.ell / n) ** p.d
    kap = p.kappa

    def vol(r):
        u = _droplet_values(r, p, n, cutoff, center)
        return kernels.chi3_moments(u, u, kap)[0] * hd

    lo = 0.0
    hi = ball_radius(omega, p.d)
    r_max = 0.5 * p.ell - 2.0 * cutoff * p.phi
    while vol(hi) < omega:
        lo, hi = hi, 1.25 * hi
        if hi > r_max:
            hi = r_max
            if vol(hi) < omega:
                raise GeometryError(f"no droplet in the torus reaches nu = {omega}")
            break
    while hi - lo > tol * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if vol(mid) < omega:
            lo = mid
        else:
            hi = mid
    return Field(p, _droplet_values(hi, p, n, cutoff, center))


def path_point(
    t: float,
    omega1: float,
    omega2: float,
    p: ModelParams,
    n: int,
    t1: float = 0.2,
    cutoff: float = DEFAULT_CUTOFF,
) -> Field:
    """Point on the nucleation path: uniform -> droplet(omega1) -> droplet(omega2)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if not 0.0 < omega1 < omega2 <= p.xi ** (p.d + 1) / 2.0:
        raise GeometryError("need 0 < omega1 < omega2 <= xi^(d+1)/2")
    if t <= t1:
        s = t / t1
        small = droplet(omega1, p, n, cutoff)
        return small.with_values((1.0 - s) * p.mean + s * small.values)
    omega = omega1 + (t - t1) / (1.0 - t1) * (omega2 - omega1)
    return droplet(omega, p, n, cutoff)


def l2_dist_mod_translation(f: Field, g: Field, max_candidates: int = 64):
    """min over lattice shifts k of ||f - roll(g, k)||_{L2}, and the minimising k.

    Candidates come from an FFT cross-correlation; the distance at near-minimal
    shifts is then recomputed directly so exact matches give exactly zero.
    Ties go to the lexicographically smallest shift.
    """
    if f.values.shape != g.values.shape or f.params != g.params:
        raise ConfigError("fields live on different grids")
    a = f.values
    b = g.values
    corr = np.fft.irfftn(np.fft.rfftn(a) * np.conj(np.fft.rfftn(b)), s=a.shape, axes=tuple(range(a.ndim)))
    base = float(np.sum(a * a) + np.sum(b * b))
    d2 = base - 2.0 * corr
    tol = 1e-9 * max(base, 1.0)
    cands = np.argwhere(d2 <= d2.min() + tol)[:max_candidates]
    best = None
    best_k = None
    axes = tuple(range(a.ndim))
    for k in cands:
        k = tuple(int(x) for x in k)
        diff = a - np.roll(b, k, axis=axes)
        val = float(np.sum(diff * diff))
        if best is None or val < best:
            best, best_k = val, k
    return math.sqrt(best * f.cell_volume), best_k
