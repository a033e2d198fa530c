"""Numerical verification of weighted Hardy-Carleman inequalities for Dirac operators."""

from .clifford import CliffordRep, build_clifford
from .dirac import GridSpec, MagneticPotential, SpinorField, apply_dirac, make_annulus_bump
from .verifier import (
    INEQUALITY_IDS,
    InequalityReport,
    magnetic_reduction_check,
    make_case,
    thm5_constant,
    verify_inequality,
)
from .weights import RadialWeight, WeightPair, radial_M

__all__ = [
    "CliffordRep",
    "GridSpec",
    "INEQUALITY_IDS",
    "InequalityReport",
    "MagneticPotential",
    "RadialWeight",
    "SpinorField",
    "WeightPair",
    "apply_dirac",
    "build_clifford",
    "magnetic_reduction_check",
    "make_annulus_bump",
    "make_case",
    "radial_M",
    "thm5_constant",
    "verify_inequality",
]
__version__ = "0.1.0"
