"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time (see :mod:`chlandscape._accel`).
Both implementations stay importable as :mod:`.numpy_kernels` and, when numba
is installed, :mod:`.numba_kernels`, so they can be compared directly.
"""
import numpy as np

from .._accel import USE_NUMBA, backend_name
from . import numpy_kernels as _np_k

if USE_NUMBA:
    from . import numba_kernels as _nb_k

__all__ = [
    "backend_name",
    "energy_gap",
    "energy_gradient",
    "dirichlet",
    "chi3",
    "chi3_prime",
    "chi3_moments",
    "contour_length",
    "potential_gap",
    "potential_gap_prime",
]

potential_gap = _np_k.potential_gap
potential_gap_prime = _np_k.potential_gap_prime
chi3 = _np_k.chi3

if USE_NUMBA:
    energy_gap = _nb_k.energy_gap
    energy_gradient = _nb_k.energy_gradient
    dirichlet = _nb_k.dirichlet

    def chi3_prime(u, kappa):
        u = np.ascontiguousarray(u, dtype=np.float64)
        return _nb_k.chi3_prime(u.ravel(), float(kappa)).reshape(u.shape)

    def chi3_moments(u, w, kappa):
        u = np.ascontiguousarray(u, dtype=np.float64).ravel()
        w = np.ascontiguousarray(w, dtype=np.float64).ravel()
        return _nb_k.chi3_moments(u, w, float(kappa))

    def contour_length(u, s):
        return _nb_k.contour_length(np.ascontiguousarray(u, dtype=np.float64), float(s))

else:
    energy_gap = _np_k.energy_gap
    energy_gradient = _np_k.energy_gradient
    dirichlet = _np_k.dirichlet
    chi3_prime = _np_k.chi3_prime
    chi3_moments = _np_k.chi3_moments
    contour_length = _np_k.contour_length
