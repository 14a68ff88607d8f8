"""Numerical tolerances shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # slack allowed on probability/angle domain checks
    domain: float = 1e-12
    # Hermiticity, trace and positivity checks on density matrices
    hermitian: float = 1e-10
    trace: float = 1e-10
    negative_eigenvalue: float = 1e-10
    # eigenvalues at or below this contribute nothing to entropies
    entropy_cutoff: float = 1e-12
    # state normalisation
    norm: float = 1e-12
    # Jacobi stops when every off-diagonal magnitude is below this
    jacobi_offdiag: float = 1e-13
    jacobi_max_sweeps: int = 100
    # presented rates at or below this are reported as 0
    rate_floor: float = 1e-14
    # scalar solvers
    eta_grid_points: int = 1001
    golden_width: float = 1e-10
    bisection_width: float = 1e-12
    # tightness of realised vs requested source characterisation
    theta_match: float = 1e-9


TOL = Tolerances()
