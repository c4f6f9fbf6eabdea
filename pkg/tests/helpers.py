"""Random inputs shared by the test modules."""
import numpy as np
from scipy import ndimage

from chlandscape.field import Field, ModelParams

DESK = ModelParams(2, 1.5, 0.04)


def band_limited(n, d=2, kmax=6, seed=0, amp=0.8, mean=0.0):
    """Smooth periodic noise with Fourier modes |k| <= kmax, scaled to max |u - mean| = amp."""
    rng = np.random.default_rng(seed)
    k = np.fft.fftfreq(n) * n
    grids = np.meshgrid(*([k] * d), indexing="ij")
    mask = sum(g * g for g in grids) <= kmax * kmax
    modes = (rng.normal(size=(n,) * d) + 1j * rng.normal(size=(n,) * d)) * mask
    u = np.fft.ifftn(modes).real
    u -= u.mean()
    return mean + amp * u / np.abs(u).max()


def random_field(p=DESK, n=64, seed=0, kmax=6, amp=0.9):
    return Field(p, band_limited(n, p.d, kmax, seed, amp, p.mean))


def random_blob(n, seed, max_fraction=0.05):
    """Simply connected random mask: a thresholded smooth bump, hole-filled, one component."""
    rng = np.random.default_rng(seed)
    for _ in range(100):
        u = band_limited(n, 2, kmax=4, seed=int(rng.integers(1 << 30)), amp=1.0)
        level = rng.uniform(0.3, 0.8)
        lab, num = ndimage.label(u > level, structure=np.ones((3, 3)))
        if num == 0:
            continue
        sizes = ndimage.sum(np.ones_like(u), lab, range(1, num + 1))
        cells = lab == (1 + int(np.argmax(sizes)))
        cells = ndimage.binary_fill_holes(cells)
        # periodic wrap can reconnect pieces; reject anything touching the border
        if cells[0].any() or cells[-1].any() or cells[:, 0].any() or cells[:, -1].any():
            continue
        if 20 <= cells.sum() <= max_fraction * n * n:
            return cells
    raise RuntimeError("no blob found")


def disk_mask(n, radius_cells, center=None):
    """Cells whose centre lies in the periodic disk (centre in cell units)."""
    c = (n / 2, n / 2) if center is None else center
    i = np.arange(n)
    dx = (i - c[0] + n / 2) % n - n / 2
    dy = (i - c[1] + n / 2) % n - n / 2
    return dx[:, None] ** 2 + dy[None, :] ** 2 <= radius_cells**2
