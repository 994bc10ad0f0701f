"""Weighted Bergman kernels, metrics and curvatures on bounded domains in C^n."""

from . import domains, geometry, kernel, minint, numerics, oracles, sequences, series
from .domains import Annulus, Ball, GeneralPlanar, Polydisc, PotentialWeight, RadialPower, Tabulated, Unit, ellipse
from .errors import BergkitError
from .kernel import KernelModel, OrthonormalSystem, build_kernel, build_orthonormal_system
from .minint import bergman_fuks, minimum_integral, minimum_integrals

__version__ = "0.1.0"

__all__ = [
    "Annulus",
    "Ball",
    "BergkitError",
    "GeneralPlanar",
    "KernelModel",
    "OrthonormalSystem",
    "Polydisc",
    "PotentialWeight",
    "RadialPower",
    "Tabulated",
    "Unit",
    "bergman_fuks",
    "build_kernel",
    "build_orthonormal_system",
    "domains",
    "ellipse",
    "geometry",
    "kernel",
    "minimum_integral",
    "minimum_integrals",
    "minint",
    "numerics",
    "oracles",
    "sequences",
    "series",
]
