"""Symmetrization machinery and comparison-inequality verification harness."""

from symm.specialfn import (
    BesselOrder,
    ball_eigen_profile,
    bessel_first_zero,
    bessel_j,
    bessel_j_scaled,
    unit_ball_volume,
)

__all__ = [
    "BesselOrder",
    "ball_eigen_profile",
    "bessel_first_zero",
    "bessel_j",
    "bessel_j_scaled",
    "unit_ball_volume",
]

__version__ = "0.1.0"
