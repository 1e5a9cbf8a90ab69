"""Tamed spectral-Galerkin solver for stochastic Allen-Cahn type equations."""

from ._core import (
    DivergenceError,
    check_config,
    eigenvalues,
    mass_matrix,
    noise_eigenvalues,
    run,
    stiffness_matrix,
)

__all__ = [
    "DivergenceError",
    "check_config",
    "eigenvalues",
    "mass_matrix",
    "noise_eigenvalues",
    "run",
    "stiffness_matrix",
]
