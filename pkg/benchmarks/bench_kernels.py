"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 256 512] [--repeat 20]

Both backends are imported side by side, so the env flag is not needed here.
Each row also reports the max abs difference between the two results.
"""
import argparse
import time

import numpy as np

from chlandscape.kernels import numba_kernels as nb
from chlandscape.kernels import numpy_kernels as npk


def _field(n, seed=0):
    rng = np.random.default_rng(seed)
    k = np.fft.fftfreq(n) * n
    modes = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    modes *= np.exp(-(k[:, None] ** 2 + k[None, :] ** 2) / 32.0)
    u = np.fft.ifft2(modes).real
    return -0.96 + 0.8 * u / np.abs(u).max()


def _best(fn, repeat):
    fn()  # warm-up (triggers JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    phi, kappa = 0.04, 0.04 ** (1 / 3)
    print(f"{'kernel':<16}{'n':>6}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}{'max diff':>11}")
    for n in args.n:
        u = _field(n)
        w = np.cos(u)
        h = 1.0 / n
        cases = {
            "energy_gap": (lambda: npk.energy_gap(u, phi, h), lambda: nb.energy_gap(u, phi, h)),
            "energy_grad": (lambda: npk.energy_gradient(u, phi, h), lambda: nb.energy_gradient(u, phi, h)),
            "dirichlet": (lambda: npk.dirichlet(u, h), lambda: nb.dirichlet(u, h)),
            "chi3_moments": (
                lambda: npk.chi3_moments(u, w, kappa),
                lambda: nb.chi3_moments(u.ravel(), w.ravel(), kappa),
            ),
            "contour_length": (lambda: npk.contour_length(u, -0.5), lambda: nb.contour_length(u, -0.5)),
        }
        for name, (f_np, f_nb) in cases.items():
            diff = float(np.max(np.abs(np.asarray(f_np()) - np.asarray(f_nb()))))
            t_np = _best(f_np, args.repeat)
            t_nb = _best(f_nb, args.repeat)
            print(f"{name:<16}{n:>6}{t_np * 1e3:>11.3f}{t_nb * 1e3:>11.3f}{t_np / t_nb:>9.1f}{diff:>11.2e}")


if __name__ == "__main__":
    main()
