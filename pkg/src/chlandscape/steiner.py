"""Discrete Steiner symmetrization on the periodic grid.

Each line along an axis is replaced by its symmetric-decreasing rearrangement
about index 0: values sorted in decreasing order are placed at indices
0, +1, -1, +2, -2, ... (modulo n). On even-length lines the unpaired cell ends
up at index n/2, i.e. on the + side. The full symmetrization applies the axes
in ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import Field, dirichlet_integral, energy_gap, l2_dist_mod_translation, potential_term


def placement_order(n: int) -> np.ndarray:
    """Target index of the k-th largest value: 0, 1, n-1, 2, n-2, ..."""
    k = np.arange(n)
    half = (k + 1) // 2
    return np.where(k % 2 == 1, half, (n - half) % n)


def distribution_mu(line, t: float, h: float = 1.0) -> float:
    """h * #{j : line[j] > t}, the length of the 1-D superlevel set."""
    return h * int(np.count_nonzero(np.asarray(line) > t))


def rearrange_lines(values: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(values, axis, -1)
    n = a.shape[-1]
    desc = -np.sort(-a, axis=-1)
    out = np.empty_like(desc)
    out[..., placement_order(n)] = desc
    return np.ascontiguousarray(np.moveaxis(out, -1, axis))


def symmetrize_axis(f: Field, axis: int) -> Field:
    if not 0 <= axis < f.params.d:
        raise ValueError(f"axis must lie in [0, {f.params.d}), got {axis}")
    return f.with_values(rearrange_lines(f.values, axis))


def steiner_symmetrize(f: Field) -> Field:
    out = f
    for ax in range(f.params.d):
        out = symmetrize_axis(out, ax)
    return out


def is_steiner_symmetric(f: Field, tol: float = 1e-12) -> bool:
    """True iff some lattice translate of f is within ``tol`` (sup norm) of its symmetrization."""
    sym = steiner_symmetrize(f)
    _, shift = l2_dist_mod_translation(sym, f)
    moved = np.roll(f.values, shift, axis=tuple(range(f.params.d)))
    return bool(np.max(np.abs(moved - sym.values)) <= tol)


def lines_symmetric_decreasing(values: np.ndarray) -> bool:
    """Every line along every axis is nonincreasing in |index| up to the half period."""
    n = values.shape[0]
    order = placement_order(n)
    for ax in range(values.ndim):
        a = np.moveaxis(values, ax, -1)[..., order]
        if np.any(np.diff(a, axis=-1) > 0):
            return False
    return True


@dataclass(frozen=True)
class EnergyDecrease:
    before: float
    after: float
    dirichlet_before: float
    dirichlet_after: float
    potential_before: float
    potential_after: float

    def to_csv(self) -> str:
        keys = ("before", "after", "dirichlet_before", "dirichlet_after", "potential_before", "potential_after")
        return ",".join(keys) + "\n" + ",".join(repr(getattr(self, k)) for k in keys) + "\n"


def energy_decrease_report(f: Field) -> EnergyDecrease:
    """Energy gap, Dirichlet integral and potential term before and after symmetrization."""
    g = steiner_symmetrize(f)
    return EnergyDecrease(
        before=energy_gap(f),
        after=energy_gap(g),
        dirichlet_before=dirichlet_integral(f),
        dirichlet_after=dirichlet_integral(g),
        potential_before=potential_term(f),
        potential_after=potential_term(g),
    )
