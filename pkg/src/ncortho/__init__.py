"""Orthogonal polynomials for kernels of moments in noncommuting variables.

Subpackages by setting:

* :mod:`ncortho.words` -- words over the free semigroup and their order
* :mod:`ncortho.schur_params` -- Schur-type parametrization of positive kernels
* :mod:`ncortho.ortho_one_var` -- one free variable: recurrences and limits
* :mod:`ncortho.classical_cases` -- unit circle, real line, Gegenbauer weights
* :mod:`ncortho.fock_multivar` -- isometric variables and Cuntz-Toeplitz kernels
* :mod:`ncortho.szego_kernels` -- reproducing kernels and the Cayley transform
* :mod:`ncortho.hermitian_jacobi` -- hermitian variables and Jacobi families
"""

from .schur_params import (
    GammaParams1D,
    MomentKernel1D,
    PositivityError,
    moments_from_params,
    params_from_moments,
    spectral_factor,
)
from .words import Word

__version__ = "0.1.0"

__all__ = [
    "GammaParams1D",
    "MomentKernel1D",
    "PositivityError",
    "Word",
    "moments_from_params",
    "params_from_moments",
    "spectral_factor",
]
