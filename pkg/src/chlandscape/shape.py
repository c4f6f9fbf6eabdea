"""Shape diagnostics of superlevel sets on the 2-D periodic grid.

Perimeters come from marching squares on the bilinear interpolant (edge
counting would overestimate circles by 4/pi). Areas are cell counts times h^2.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .field import Field
from .limit_model import ball_perimeter

SHARP_C2 = 0.1  # check constant for the quantitative inequality in d = 2
SMALL_SET_FRACTION = 0.05  # stand-in for the non-explicit smallness threshold


class UnsupportedDimension(ValueError):
    pass


class ShapeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Mask:
    cells: np.ndarray
    h: float

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def ell(self) -> float:
        return self.n * self.h

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.cells))

    @property
    def area(self) -> float:
        return self.count * self.h * self.h


def _require_2d(f: Field):
    if f.params.d != 2:
        raise UnsupportedDimension(f"shape diagnostics need d = 2, got d = {f.params.d}")


def superlevel_mask(f: Field, s: float) -> Mask:
    _require_2d(f)
    return Mask(f.values > s, f.h)


def perimeter(f: Field, s: float) -> float:
    """Length of the s-level contour of the periodic bilinear interpolant."""
    _require_2d(f)
    return kernels.contour_length(f.values, s) * f.h


def mask_perimeter(m: Mask) -> float:
    return kernels.contour_length(m.cells.astype(np.float64), 0.5) * m.h


def p_e(area: float, d: int) -> float:
    """Perimeter of the Euclidean ball with the given volume."""
    return ball_perimeter(area, d)


def _index_offsets(n: int) -> np.ndarray:
    i = np.arange(n)
    return (i + n // 2) % n - n // 2


def _ball_template(n: int, h: float, radius: float) -> np.ndarray:
    o = _index_offsets(n) * h
    return (o[:, None] ** 2 + o[None, :] ** 2) <= radius * radius


def fraenkel_asymmetry(m: Mask) -> float:
    """min over lattice centres c of |A (sym. diff.) B(c)| / |A|.

    B(c) is the cell-centre rasterisation of the periodic disk with the same
    area as A. Overlaps for all n^2 centres come from one FFT correlation.
    """
    if m.count == 0:
        raise ShapeError("empty mask")
    radius = math.sqrt(m.area / math.pi)
    if radius > 0.5 * m.ell:
        raise ShapeError("mask too large: equal-area disk exceeds the inscribed disk")
    ball = _ball_template(m.n, m.h, radius)
    a = m.cells.astype(np.float64)
    corr = np.fft.irfft2(np.fft.rfft2(a) * np.conj(np.fft.rfft2(ball.astype(np.float64))), s=a.shape)
    overlap = np.rint(corr).max()
    symdiff = m.count + np.count_nonzero(ball) - 2.0 * overlap
    return float(symdiff / m.count)


def _weight(t: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0 * (1.0 - t * t) ** 2 / 4.0)


def level_grid(f: Field, levels: int) -> np.ndarray:
    kap = f.params.kappa
    return np.linspace(-1.0 + 2.0 * kap, 1.0 - 2.0 * kap, levels)


def isoperimetric_defect(f: Field, levels: int = 33) -> float:
    """Trapezoid rule over levels of sqrt(2 G(t)) * (Per{u>t} - P_E(|{u>t}|)).

    Levels are equispaced on [-1 + 2 phi^(1/3), 1 - 2 phi^(1/3)].
    """
    _require_2d(f)
    if levels < 3:
        raise ValueError("need at least 3 levels")
    ts = level_grid(f, levels)
    vals = np.empty(levels)
    for k, t in enumerate(ts):
        area = np.count_nonzero(f.values > t) * f.h * f.h
        vals[k] = perimeter(f, t) - p_e(area, 2)
    return float(np.trapezoid(_weight(ts) * vals, ts))


@dataclass(frozen=True)
class IsoperimetricCheck:
    status: str  # "pass", "fail" or "inconclusive"
    perimeter: float
    bound: float
    margin: float  # (perimeter - bound) / P_E
    asymmetry: Optional[float] = None


def check_isoperimetric(m: Mask, sharp: bool = False) -> IsoperimetricCheck:
    """Numerical check of Per >= P_E, or of the quantitative torus version.

    The sharp form is Per >= P_E + C lambda^2 P_E - 4 d |A| / ell with C = 0.1.
    Sets larger than 5% of the torus are reported as inconclusive.
    """
    per = mask_perimeter(m)
    area = m.area
    pe = p_e(area, 2)
    lam = None
    bound = pe
    if sharp and area > 0:
        lam = fraenkel_asymmetry(m)
        bound = pe + SHARP_C2 * lam * lam * pe - 8.0 * area / m.ell
    margin = (per - bound) / pe if pe > 0 else 0.0
    if area == 0 or area > SMALL_SET_FRACTION * m.ell**2:
        status = "inconclusive"
    else:
        status = "pass" if per >= bound else "fail"
    return IsoperimetricCheck(status, per, bound, margin, lam)


def periodic_centroid(m: Mask) -> tuple[float, float]:
    """Circular mean of the cell indices along each axis."""
    n = m.n
    ang = 2.0 * np.pi * np.arange(n) / n
    out = []
    for ax in (0, 1):
        w = m.cells.sum(axis=1 - ax).astype(np.float64)
        c = math.atan2(float(np.dot(w, np.sin(ang))), float(np.dot(w, np.cos(ang))))
        out.append((c * n / (2.0 * np.pi)) % n)
    return out[0], out[1]


def recenter(m: Mask) -> np.ndarray:
    """Roll the mask so its periodic centroid lands on cell (n/2, n/2)."""
    cx, cy = periodic_centroid(m)
    n = m.n
    shift = (int(round(n / 2 - cx)) % n, int(round(n / 2 - cy)) % n)
    return np.roll(m.cells, shift, axis=(0, 1))


def _circle2(p, q):
    c = 0.5 * (p + q)
    return c, float(np.hypot(*(p - c)))


def _circle3(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    dd = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(dd) < 1e-14:
        cands = [_circle2(p, q), _circle2(p, r), _circle2(q, r)]
        return max(cands, key=lambda t: t[1])
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / dd
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / dd
    c = np.array([ux, uy])
    return c, float(np.hypot(*(p - c)))


def min_enclosing_circle(points: np.ndarray):
    """Smallest circle containing all points (Welzl, fixed shuffle)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) >= 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    pts = pts[np.random.default_rng(0).permutation(len(pts))]
    eps = 1e-10

    def inside(circ, x):
        return np.hypot(*(x - circ[0])) <= circ[1] + eps

    circ = (pts[0], 0.0)
    for i in range(1, len(pts)):
        p = pts[i]
        if inside(circ, p):
            continue
        circ = (p, 0.0)
        for j in range(i):
            q = pts[j]
            if inside(circ, q):
                continue
            circ = _circle2(p, q)
            for k in range(j):
                if not inside(circ, pts[k]):
                    circ = _circle3(p, q, pts[k])
    return circ


@dataclass(frozen=True)
class BonnesenRadii:
    rho_in: float
    rho_out: float
    rho: float


def bonnesen_radii(m: Mask) -> BonnesenRadii:
    """Inner, outer and equal-area radii of a (recentred) planar mask.

    The boundary is taken half a cell outside the outermost cell centres:
    rho_in is the largest centre-to-complement distance minus h/2 and rho_out
    the enclosing radius of the boundary cell centres plus h/2.
    """
    if m.count == 0:
        raise ShapeError("empty mask")
    cells = recenter(m)
    n = m.n
    idx = np.argwhere(cells)
    lo, hi = n // 2 - n // 4, n // 2 + n // 4
    if idx.min() <= lo or idx.max() >= hi:
        raise ShapeError("set too large for Euclidean radii")
    h = m.h
    edt = ndimage.distance_transform_edt(cells, sampling=h)
    rho_in = float(edt.max()) - 0.5 * h
    interior = ndimage.binary_erosion(cells, structure=ndimage.generate_binary_structure(2, 1))
    boundary = np.argwhere(cells & ~interior) * h
    _, r_out = min_enclosing_circle(boundary)
    rho_out = r_out + 0.5 * h
    return BonnesenRadii(rho_in=rho_in, rho_out=rho_out, rho=math.sqrt(m.area / math.pi))


def bonnesen_bound(area: float, radii: BonnesenRadii) -> float:
    """sqrt(pi) * (4|A| + (rho_out - rho_in)^2)^(1/2)."""
    return math.sqrt(math.pi) * math.sqrt(4.0 * area + (radii.rho_out - radii.rho_in) ** 2)


@dataclass(frozen=True)
class LevelRecord:
    s: float
    area: float
    perimeter: float
    p_e: float
    fraenkel: float  # NaN where undefined (empty or oversize set)


@dataclass
class ShapeReport:
    records: list = dc_field(default_factory=list)
    defect: float = 0.0
    bonnesen: Optional[BonnesenRadii] = None

    def to_csv(self) -> str:
        out = io.StringIO(newline="")
        out.write("s,area,perimeter,p_e,fraenkel\n")
        for r in self.records:
            fr = "" if math.isnan(r.fraenkel) else repr(r.fraenkel)
            out.write(f"{r.s!r},{r.area!r},{r.perimeter!r},{r.p_e!r},{fr}\n")
        out.write(f"# defect={self.defect!r}\n")
        if self.bonnesen is not None:
            b = self.bonnesen
            out.write(f"# rho_in={b.rho_in!r}\n# rho_out={b.rho_out!r}\n# rho={b.rho!r}\n")
        return out.getvalue()


def shape_report(f: Field, levels: int = 33) -> ShapeReport:
    """Per-level geometry, the isoperimetric defect, and Bonnesen radii of {u > 0}."""
    _require_2d(f)
    rep = ShapeReport(defect=isoperimetric_defect(f, levels))
    for t in level_grid(f, levels):
        m = superlevel_mask(f, t)
        try:
            lam = fraenkel_asymmetry(m)
        except ShapeError:
            lam = float("nan")
        rep.records.append(
            LevelRecord(float(t), m.area, perimeter(f, t), p_e(m.area, 2), lam)
        )
    try:
        rep.bonnesen = bonnesen_radii(superlevel_mask(f, 0.0))
    except ShapeError:
        rep.bonnesen = None
    return rep
