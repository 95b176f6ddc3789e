"""Numerical laboratory for a weighted disk mean-value equation.

Modules:

* ``specfun``   Bessel J_k of complex argument, derivatives, cylinder profiles
* ``chareq``    the characteristic function G and g_r(z) = G(rz)
* ``zeroscan``  certified zeros of G by the argument principle
* ``fields``    test fields with exact Wirtinger derivatives
* ``meanvalue`` both sides of the equation and their residual
* ``synthesis`` truncated solutions from polynomials and cylinder waves
* ``tworadii``  common zeros for two radii and the resulting regimes
* ``persist``   JSON/CSV documents
* ``cli``       command-line front end
"""

__version__ = "0.1.0"

from .chareq import CharacteristicFn, EquationParams, eval_g, eval_g_deriv  # noqa: E402
from .fields import CylinderWave, Monomial, PlaneWave, Superposition, wirtinger, wirtinger_fd  # noqa: E402
from .meanvalue import QuadratureRule, ResidualReport, plane_wave_defect, residual  # noqa: E402
from .zeroscan import ZeroCatalog, find_zeros, select_Zr  # noqa: E402

__all__ = [
    "__version__", "CharacteristicFn", "EquationParams", "eval_g", "eval_g_deriv",
    "CylinderWave", "Monomial", "PlaneWave", "Superposition", "wirtinger", "wirtinger_fd",
    "QuadratureRule", "ResidualReport", "plane_wave_defect", "residual",
    "ZeroCatalog", "find_zeros", "select_Zr",
]
