"""Small dense Hermitian linear algebra for states on at most 16 dimensions.

Bipartite pure states over ``C^dB (x) C^dE`` use the index convention
``b * dE + e``, i.e. row-major reshape to ``(dB, dE)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .config import TOL
from .errors import ConvergenceError, DomainError

__all__ = [
    "MAX_DIM",
    "JointState",
    "as_matrix",
    "as_density_matrix",
    "hermitian_eigensystem",
    "partial_trace",
    "von_neumann_entropy",
    "fidelity",
    "trace_distance",
    "trace_norm",
    "projector",
]

MAX_DIM = 16


def as_matrix(m, max_dim: int = MAX_DIM) -> np.ndarray:
    """Return ``m`` as a square complex array, checking shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= max_dim:
        raise DomainError(f"dimension {a.shape[0]} outside [1, {max_dim}]")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def _check_hermitian(a: np.ndarray) -> None:
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > TOL.hermitian:
        raise DomainError(f"matrix not Hermitian (max deviation {dev:.3g})")


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cyclic complex Jacobi: each rotation U = diag(1, e^{-i phi}) . [[c, s], [-s, c]]
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(a))))
    thresh = TOL.jacobi_offdiag * scale
    for _ in range(TOL.jacobi_max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() < thresh:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b < thresh:
                    continue
                phase = apq / b
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * b)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u
    raise ConvergenceError("Jacobi eigensolver did not converge")


def hermitian_eigensystem(m, max_dim: int = MAX_DIM) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    a = as_matrix(m, max_dim)
    _check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    w, v = _jacobi(a)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def as_density_matrix(m) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    a = as_matrix(m)
    _check_hermitian(a)
    tr = np.trace(a)
    if abs(tr - 1.0) > TOL.trace:
        raise DomainError(f"trace {tr.real:.12g} is not 1")
    w, _ = hermitian_eigensystem(a)
    if w[0] < -TOL.negative_eigenvalue:
        raise DomainError(f"negative eigenvalue {w[0]:.3g}")
    return a


def _clipped_spectrum(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = hermitian_eigensystem(rho)
    if w.size and w[0] < -TOL.negative_eigenvalue:
        raise DomainError(f"negative eigenvalue {w[0]:.3g}")
    return np.clip(w, 0.0, None), v


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    w, v = _clipped_spectrum(rho)
    return (v * np.sqrt(w)) @ v.conj().T


def projector(vec) -> np.ndarray:
    psi = np.asarray(vec, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


@dataclass(frozen=True, eq=False)
class JointState:
    """Normalised pure state on Bob (dimension ``dim_b``) and Eve (``dim_e``)."""

    amplitudes: np.ndarray
    dim_b: int = 2
    dim_e: int = 4

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if not 1 <= self.dim_e <= 8:
            raise DomainError(f"dim_e={self.dim_e} outside [1, 8]")
        if amps.size != self.dim_b * self.dim_e:
            raise DomainError(f"expected {self.dim_b * self.dim_e} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL.norm:
            raise DomainError(f"state norm {norm:.15g} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a ``(dim_b, dim_e)`` array."""
        return self.amplitudes.reshape(self.dim_b, self.dim_e)

    def inner(self, other: "JointState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def partial_trace(state: JointState, keep: Literal["B", "E"]) -> np.ndarray:
    """Reduced density matrix of ``state`` on subsystem ``keep``."""
    psi = state.matrix()
    if keep == "B":
        return psi @ psi.conj().T
    if keep == "E":
        return psi.T @ psi.conj()
    raise DomainError(f"keep must be 'B' or 'E', got {keep!r}")


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho`` in bits."""
    w, _ = _clipped_spectrum(as_density_matrix(rho))
    w = w[w > TOL.entropy_cutoff]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def trace_norm(m) -> float:
    """Sum of singular values.

    Computed from the spectrum of the Hermitian dilation ``[[0, M], [M^H, 0]]``,
    whose eigenvalues are ``+-`` the singular values of ``M``.  This keeps
    small singular values accurate, unlike square roots of ``M^H M``.
    """
    a = as_matrix(m)
    n = a.shape[0]
    dil = np.zeros((2 * n, 2 * n), dtype=complex)
    dil[:n, n:] = a
    dil[n:, :n] = a.conj().T
    w, _ = hermitian_eigensystem(dil, max_dim=2 * MAX_DIM)
    return float(0.5 * np.sum(np.abs(w)))


def fidelity(rho, sigma) -> float:
    """``|| sqrt(rho) sqrt(sigma) ||_1``; equals ``|<psi|phi>|`` for pure states."""
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    return min(trace_norm(_sqrtm_psd(rho) @ _sqrtm_psd(sigma)), 1.0)


def trace_distance(rho, sigma) -> float:
    """``(1/2) || rho - sigma ||_1``."""
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    w, _ = hermitian_eigensystem(rho - sigma)
    return float(min(0.5 * np.sum(np.abs(w)), 1.0))
