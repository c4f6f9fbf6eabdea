"""Cahn-Hilliard droplet energy landscapes on the flat torus."""
from ._accel import backend_name
from .field import (
    ConfigError,
    Field,
    GeometryError,
    ModelParams,
    SharpProfile,
    chi_partition,
    droplet,
    energy_gap,
    energy_gradient,
    l2_dist_mod_translation,
    make_sharp_profile,
    nu,
    path_point,
    uniform_field,
)
from .fieldio import FieldFileError, read_field, write_field
from .limit_model import LimitParams, critical_constants, f_xi, f_xi_prime, solve_extrema

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "ConfigError",
    "Field",
    "FieldFileError",
    "GeometryError",
    "LimitParams",
    "ModelParams",
    "SharpProfile",
    "chi_partition",
    "critical_constants",
    "droplet",
    "energy_gap",
    "energy_gradient",
    "f_xi",
    "f_xi_prime",
    "l2_dist_mod_translation",
    "make_sharp_profile",
    "nu",
    "path_point",
    "read_field",
    "solve_extrema",
    "uniform_field",
    "write_field",
]
