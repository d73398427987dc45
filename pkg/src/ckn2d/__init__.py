"""Numerics for the two-dimensional weighted Moser-Trudinger and
Caffarelli-Kohn-Nirenberg inequalities.

Submodules
----------
numerics         quadrature, log-Gamma, Beta integrals, sech^2-well ground states
geometry         plane / sphere / cylinder frames, measures and transforms
closed_forms     explicit extremals, constants and stability thresholds
cylinder_solver  minimization of the cylinder Sobolev quotient
spectrum         linearized stability of the radial extremal
mt_lab           Moser-Trudinger checks, counterexamples and the CKN limit
region_mapper    the (a, b) phase diagram
cli              command-line entry point
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, GridTooCoarseError, QuadratureError

__all__ = [
    "__version__",
    "ConvergenceError",
    "DomainError",
    "GridTooCoarseError",
    "QuadratureError",
]
