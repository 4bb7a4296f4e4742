"""qpathdist: how far a Hilbert-space path is from true quantum evolution.

The central quantity is the time integral of the phase-minimised
Schroedinger defect norm along a path of unit vectors.  It vanishes exactly
on true solutions, is additive over sub-intervals, and measures the quality
of semiclassical (coherent-state) approximations; a compatible pair distance
scores two paths against each other.
"""

from .distance import (DistanceReport, dist_operator, dist_ray, dist_vector,
                       distance_path, pointwise_defect,
                       pointwise_defect_reduced)
from .dynamics import (ClassicalPath, ModelSpec, StatePath,
                       classical_hamiltonian, expectation_rhs,
                       integrate_hamilton, lift_to_coherent_path,
                       propagate_schrodinger)
from .errors import (ConfigError, ConvergenceError, NumericalGateError,
                     TruncationError)
from .extend import ExtendedOptimization, optimize_extended_path
from .fock import (Fiducial, FiducialSpec, FockContext, build_fock,
                   coherent_state, extended_coherent_state, make_fiducial,
                   moment)
from .linalg import (EigenDecomposition, expm_apply, hermitian_eigen, inner)
from .models import (harmonic_model, polynomial_model, quartic_model,
                     spin1_model, weyl_monomial)
from .pairdist import PairReport, pair_distance, pointwise_pair_defect
from .quadrature import TimeGrid
from .scan import ScanResult, hbar_scan, prepare_fock_scenario
from .spin import (SpinContext, SpinPathPoint, build_spin, kinematic_one_form,
                   spin1_coherent, spin_distance_closed_form,
                   spin_distance_numeric, spin_integrand)

__version__ = "0.1.0"

__all__ = [
    "ClassicalPath", "ConfigError", "ConvergenceError", "DistanceReport",
    "EigenDecomposition", "ExtendedOptimization", "Fiducial", "FiducialSpec",
    "FockContext", "ModelSpec", "NumericalGateError", "PairReport",
    "ScanResult", "SpinContext", "SpinPathPoint", "StatePath", "TimeGrid",
    "TruncationError", "build_fock", "build_spin", "classical_hamiltonian",
    "coherent_state", "dist_operator", "dist_ray", "dist_vector",
    "distance_path", "expectation_rhs", "expm_apply",
    "extended_coherent_state", "harmonic_model", "hbar_scan",
    "hermitian_eigen", "inner", "integrate_hamilton", "kinematic_one_form",
    "lift_to_coherent_path", "make_fiducial", "moment",
    "optimize_extended_path", "pair_distance", "pointwise_defect",
    "pointwise_defect_reduced", "pointwise_pair_defect", "polynomial_model",
    "prepare_fock_scenario", "propagate_schrodinger", "quartic_model",
    "spin1_coherent", "spin1_model", "spin_distance_closed_form",
    "spin_distance_numeric", "spin_integrand", "weyl_monomial",
]
