"""numba versions of the hot kernels.

All loops run serially over a 3-D view of the grid (2-D grids get a leading
axis of length one, whose differences vanish). Sums are accumulated per line
and then over lines in index order, so results do not depend on threading.
"""
import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _wgap(x, m):
    dlt = x - m
    return dlt * dlt * (0.5 * (3.0 * m * m - 1.0) + m * dlt + 0.25 * dlt * dlt)


@njit(cache=True, inline="always")
def _wgap_prime(x, m):
    dlt = x - m
    return dlt * ((3.0 * m * m - 1.0) + 3.0 * m * dlt + dlt * dlt)


@njit(cache=True)
def _energy3(u, phi, h):
    n0, n1, n2 = u.shape
    m = -1.0 + phi
    cg = 0.5 * phi / (h * h)
    lines = np.zeros(n0 * n1)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            acc = 0.0
            for k in range(n2):
                kp = k + 1 if k + 1 < n2 else 0
                x = u[i, j, k]
                a = u[ip, j, k] - x
                b = u[i, jp, k] - x
                c = u[i, j, kp] - x
                acc += cg * (a * a + b * b + c * c) + _wgap(x, m) / phi
            lines[i * n1 + j] = acc
    total = 0.0
    for q in range(n0 * n1):
        total += lines[q]
    return total


@njit(cache=True)
def _dirichlet3(u):
    n0, n1, n2 = u.shape
    lines = np.zeros(n0 * n1)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            acc = 0.0
            for k in range(n2):
                kp = k + 1 if k + 1 < n2 else 0
                x = u[i, j, k]
                a = u[ip, j, k] - x
                b = u[i, jp, k] - x
                c = u[i, j, kp] - x
                acc += a * a + b * b + c * c
            lines[i * n1 + j] = acc
    total = 0.0
    for q in range(n0 * n1):
        total += lines[q]
    return total


@njit(cache=True)
def _gradient3(u, phi, h, ndim):
    n0, n1, n2 = u.shape
    m = -1.0 + phi
    ch = phi / (h * h)
    out = np.empty_like(u)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        im = i - 1 if i > 0 else n0 - 1
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j > 0 else n1 - 1
            for k in range(n2):
                kp = k + 1 if k + 1 < n2 else 0
                km = k - 1 if k > 0 else n2 - 1
                x = u[i, j, k]
                nb = u[i, jp, k] + u[i, jm, k] + u[i, j, kp] + u[i, j, km]
                if ndim == 3:
                    nb += u[ip, j, k] + u[im, j, k]
                lap = nb - 2.0 * ndim * x
                out[i, j, k] = -ch * lap + _wgap_prime(x, m) / phi
    return out


@njit(cache=True, inline="always")
def _ramp_arg(t, kappa):
    x = (t - (1.0 - 2.0 * kappa)) / kappa
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


@njit(cache=True)
def chi3_moments(u, w, kappa):
    """(sum chi3(u), sum chi3'(u), sum chi3'(u) * w) over flat arrays."""
    n = u.size
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for q in range(n):
        x = _ramp_arg(u[q], kappa)
        s0 += x * x * (3.0 - 2.0 * x)
        dc = 6.0 * x * (1.0 - x) / kappa
        s1 += dc
        s2 += dc * w[q]
    return s0, s1, s2


@njit(cache=True)
def chi3_prime(u, kappa):
    out = np.empty_like(u)
    for q in range(u.size):
        x = _ramp_arg(u[q], kappa)
        out[q] = 6.0 * x * (1.0 - x) / kappa
    return out


@njit(cache=True, inline="always")
def _dist(x0, y0, x1, y1):
    dx = x0 - x1
    dy = y0 - y1
    return np.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def contour_length(u, s):
    n0, n1 = u.shape
    rows = np.zeros(n0)
    px = np.empty(4)
    py = np.empty(4)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        acc = 0.0
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            a = u[i, j]
            b = u[ip, j]
            c = u[ip, jp]
            d = u[i, jp]
            ia = a > s
            ib = b > s
            ic = c > s
            id_ = d > s
            ncross = 0
            first = -1
            second = -1
            if ia != ib:
                px[0] = (s - a) / (b - a)
                py[0] = 0.0
                ncross += 1
                first = 0
            if ib != ic:
                px[1] = 1.0
                py[1] = (s - b) / (c - b)
                ncross += 1
                if first < 0:
                    first = 1
                else:
                    second = 1
            if id_ != ic:
                px[2] = (s - d) / (c - d)
                py[2] = 1.0
                ncross += 1
                if first < 0:
                    first = 2
                else:
                    second = 2
            if ia != id_:
                px[3] = 0.0
                py[3] = (s - a) / (d - a)
                ncross += 1
                second = 3
            if ncross == 2:
                acc += _dist(px[first], py[first], px[second], py[second])
            elif ncross == 4:
                centre_in = (a + b + c + d) * 0.25 > s
                if (ia and ic) == centre_in:
                    acc += _dist(px[0], py[0], px[1], py[1]) + _dist(px[2], py[2], px[3], py[3])
                else:
                    acc += _dist(px[3], py[3], px[0], py[0]) + _dist(px[1], py[1], px[2], py[2])
        rows[i] = acc
    total = 0.0
    for i in range(n0):
        total += rows[i]
    return total


def _as3(u):
    u = np.ascontiguousarray(u, dtype=np.float64)
    return u.reshape((1,) + u.shape) if u.ndim == 2 else u


def energy_gap(u, phi, h):
    return _energy3(_as3(u), float(phi), float(h)) * h**u.ndim


def dirichlet(u, h):
    return _dirichlet3(_as3(u)) * h ** (u.ndim - 2)


def energy_gradient(u, phi, h):
    g = _gradient3(_as3(u), float(phi), float(h), u.ndim)
    return g.reshape(u.shape)
