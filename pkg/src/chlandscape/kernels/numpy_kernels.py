"""Reference kernels in plain numpy.

Arrays are periodic grids of shape ``(n,) * d`` with axis 0 the x-direction.
These are the fallback path and the reference the numba kernels are checked
against.
"""
import numpy as np


def potential_gap(u, m):
    """G(u) - G(m) - G'(m)(u - m) for G(u) = (1 - u^2)^2 / 4, in Taylor form."""
    dlt = u - m
    return dlt * dlt * (0.5 * (3.0 * m * m - 1.0) + m * dlt + 0.25 * dlt * dlt)


def potential_gap_prime(u, m):
    """G'(u) - G'(m)."""
    dlt = u - m
    return dlt * ((3.0 * m * m - 1.0) + 3.0 * m * dlt + dlt * dlt)


def _forward_sq(u):
    out = np.zeros_like(u)
    for ax in range(u.ndim):
        diff = np.roll(u, -1, axis=ax) - u
        out += diff * diff
    return out


def energy_gap(u, phi, h):
    m = -1.0 + phi
    dens = (0.5 * phi / (h * h)) * _forward_sq(u) + potential_gap(u, m) / phi
    return float(dens.sum()) * h**u.ndim


def dirichlet(u, h):
    """h^d * sum |grad_h u|^2 with forward differences."""
    return float(_forward_sq(u).sum()) * h ** (u.ndim - 2)


def laplacian(u, h):
    lap = -2.0 * u.ndim * u
    for ax in range(u.ndim):
        lap = lap + np.roll(u, -1, axis=ax) + np.roll(u, 1, axis=ax)
    return lap / (h * h)


def energy_gradient(u, phi, h):
    m = -1.0 + phi
    return -phi * laplacian(u, h) + potential_gap_prime(u, m) / phi


def _smooth_ramp(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def chi3(t, kappa):
    return _smooth_ramp((np.asarray(t, dtype=float) - (1.0 - 2.0 * kappa)) / kappa)


def chi3_prime(t, kappa):
    x = np.clip((np.asarray(t, dtype=float) - (1.0 - 2.0 * kappa)) / kappa, 0.0, 1.0)
    return 6.0 * x * (1.0 - x) / kappa


def chi3_moments(u, w, kappa):
    """(sum chi3(u), sum chi3'(u), sum chi3'(u) * w)."""
    dc = chi3_prime(u, kappa)
    return float(chi3(u, kappa).sum()), float(dc.sum()), float((dc * w).sum())


def contour_length(u, s):
    """Length (in cell units) of the s-level contour of the periodic bilinear interpolant."""
    a = u
    b = np.roll(u, -1, axis=0)
    d = np.roll(u, -1, axis=1)
    c = np.roll(b, -1, axis=1)
    ia, ib, ic, id_ = a > s, b > s, c > s, d > s
    cross = [ia != ib, ib != ic, id_ != ic, ia != id_]
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = (s - a) / (b - a)
        t1 = (s - b) / (c - b)
        t2 = (s - d) / (c - d)
        t3 = (s - a) / (d - a)
    # edges without a crossing carry garbage (0/0); zero them so segments stay finite
    t0, t1, t2, t3 = (np.where(cr, t, 0.0) for cr, t in zip(cross, (t0, t1, t2, t3)))
    zero = np.zeros_like(u)
    one = np.ones_like(u)
    # crossing points on edges a-b, b-c, d-c, a-d
    pts = [(t0, zero), (one, t1), (t2, one), (zero, t3)]

    def seg(i, j):
        dx = pts[i][0] - pts[j][0]
        dy = pts[i][1] - pts[j][1]
        return np.sqrt(dx * dx + dy * dy)

    ncross = sum(cr.astype(np.int8) for cr in cross)
    total = np.zeros_like(u)
    two = ncross == 2
    for i in range(4):
        for j in range(i + 1, 4):
            sel = two & cross[i] & cross[j]
            if sel.any():
                total[sel] += seg(i, j)[sel]
    four = ncross == 4
    if four.any():
        centre_in = (a + b + c + d) * 0.25 > s
        code5 = ia & ic
        iso_bd = (code5 & centre_in) | (~code5 & ~centre_in)
        bd = seg(0, 1) + seg(2, 3)
        ac = seg(3, 0) + seg(1, 2)
        total[four] += np.where(iso_bd, bd, ac)[four]
    return float(total.sum())
