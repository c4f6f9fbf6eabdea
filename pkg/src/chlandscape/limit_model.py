"""Sharp-interface limit of the rescaled Cahn-Hilliard energy gap.

Everything here is closed form or a one-dimensional bisection, so it runs in
microseconds and serves as the reference curve for the grid computations.

The limit energy of a ball of volume ``nu`` is::

    f_xi(nu) = C1 * nu**((d-1)/d) - 4*nu + 4 * xi**-(d+1) * nu**2

with ``C1 = c0 * sigma_d**(1/d) * d**((d-1)/d)`` and ``c0 = 2*sqrt(2)/3`` the
surface tension of the quartic double well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

C0 = 2.0 * math.sqrt(2.0) / 3.0
BISECT_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain of a limit-model function."""


@dataclass(frozen=True)
class LimitParams:
    d: int
    xi: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d!r}")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be positive and finite, got {self.xi!r}")


@dataclass(frozen=True)
class Extrema:
    nu_s: float
    nu_m: float
    c_s: float
    c_m: float
    gamma0: float


@dataclass(frozen=True)
class LimitLandscape:
    params: LimitParams
    c0: float
    sigma_d: float
    c1_bar: float
    xi_tilde: float
    xi_d: float
    extrema: Optional[Extrema]


def sphere_area(d: int) -> float:
    """Surface area of the unit (d-1)-sphere, 2 pi^(d/2) / Gamma(d/2)."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def c1_bar(d: int) -> float:
    return C0 * sphere_area(d) ** (1.0 / d) * d ** ((d - 1.0) / d)


def f_xi(nu: float, p: LimitParams) -> float:
    if nu < 0:
        raise DomainError(f"volume must be nonnegative, got {nu}")
    d = p.d
    return c1_bar(d) * nu ** ((d - 1.0) / d) - 4.0 * nu + 4.0 * p.xi ** (-(d + 1.0)) * nu * nu


def f_xi_prime(nu: float, p: LimitParams) -> float:
    if nu <= 0:
        raise DomainError(f"derivative is singular at nu <= 0, got {nu}")
    d = p.d
    return (d - 1.0) / d * c1_bar(d) * nu ** (-1.0 / d) - 4.0 + 8.0 * p.xi ** (-(d + 1.0)) * nu


def f_xi_second(nu: float, p: LimitParams) -> float:
    if nu <= 0:
        raise DomainError(f"second derivative is singular at nu <= 0, got {nu}")
    d = p.d
    return -(d - 1.0) / (d * d) * c1_bar(d) * nu ** (-1.0 / d - 1.0) + 8.0 * p.xi ** (-(d + 1.0))


def critical_constants(d: int) -> tuple[float, float]:
    """Return ``(xi_tilde, xi_d)``: the saddle-node point and the crossover point."""
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d!r}")
    sig = sphere_area(d)
    xi_d = C0 ** (d / (d + 1.0)) * sig ** (1.0 / (d + 1.0)) * (d + 1.0) / (
        4.0 ** (d / (d + 1.0)) * d ** (1.0 / (d + 1.0))
    )
    xi_tilde = xi_d * (1.0 - 1.0 / d) ** (d / (d + 1.0)) * 2.0 ** (1.0 / (d + 1.0))
    return xi_tilde, xi_d


def inflection_volume(p: LimitParams) -> float:
    """Unique zero of f_xi'' (the minimum of f_xi'), in closed form."""
    d = p.d
    return ((d - 1.0) / (d * d) * c1_bar(d) * p.xi ** (d + 1.0) / 8.0) ** (d / (d + 1.0))


def _bisect(fn, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    flo = fn(lo)
    if flo == 0.0:
        return lo
    if (flo > 0) == (fn(hi) > 0):
        raise DomainError(f"root not bracketed in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_extrema(p: LimitParams) -> LimitLandscape:
    """Constants of the landscape plus the positive local max/min of f_xi when they exist."""
    xi_tilde, xi_d = critical_constants(p.d)
    extrema = None
    nu_hat = inflection_volume(p)
    if p.xi > xi_tilde and f_xi_prime(nu_hat, p) < 0.0:
        fp = lambda v: f_xi_prime(v, p)  # noqa: E731
        nu_s = _bisect(fp, 1e-9, nu_hat)
        nu_m = _bisect(fp, nu_hat, p.xi ** (p.d + 1) / 2.0)
        extrema = Extrema(
            nu_s=nu_s,
            nu_m=nu_m,
            c_s=f_xi(nu_s, p),
            c_m=f_xi(nu_m, p),
            gamma0=2.0 * math.sqrt(nu_m - nu_s),
        )
    return LimitLandscape(
        params=p,
        c0=C0,
        sigma_d=sphere_area(p.d),
        c1_bar=c1_bar(p.d),
        xi_tilde=xi_tilde,
        xi_d=xi_d,
        extrema=extrema,
    )


def limit_energy_set(perimeter: float, volume: float, p: LimitParams) -> float:
    """c0 Per - 4|A| + 4|A|^2 / xi^(d+1) for a set with the given perimeter and volume."""
    if perimeter < 0 or volume < 0:
        raise DomainError("perimeter and volume must be nonnegative")
    return C0 * perimeter - 4.0 * volume + 4.0 * volume * volume / p.xi ** (p.d + 1)


def ball_perimeter(volume: float, d: int) -> float:
    """Perimeter of the ball with the given volume (the isoperimetric function P_E)."""
    if volume < 0:
        raise DomainError(f"volume must be nonnegative, got {volume}")
    return sphere_area(d) ** (1.0 / d) * d ** ((d - 1.0) / d) * volume ** ((d - 1.0) / d)
