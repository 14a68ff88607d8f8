"""Explicit source states and optimal collective attacks that saturate the bound.

Eve's four vectors live in a fixed orthonormal basis ``e0..e3``::

    psi0 = e0            psi0' = F e0 + sqrt(1-F^2) e1
    psi1 = e2            psi1' = F e2 + sqrt(1-F^2) e3

so ``<psi0|psi0'> = <psi1|psi1'> = F`` and the pairs ``{psi0, psi0'}`` and
``{psi1, psi1'}`` span orthogonal planes.  Bob's qubit carries the z basis
``|0>, |1>`` and x basis ``|+>, |->``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import TOL
from .errors import CharacterisationError, DegenerateAmplitudeError, DomainError, InfeasibleError
from .keyrate import (
    EtaLike,
    ProtocolParams,
    _eta,
    binary_entropy,
    cond_entropy_bound,
    f_theta,
    fidelity_bound,
    rate_bound,
)
from .linalg import JointState, partial_trace, von_neumann_entropy

__all__ = [
    "AttackParams",
    "AttackStates",
    "Marginals",
    "CoinState",
    "TightnessReport",
    "build_attack",
    "attack_theta",
    "characterisation_rhs",
    "realised_theta",
    "marginals",
    "error_rates",
    "exact_conditional_entropy",
    "mixture_entropy",
    "closed_form_mixture_entropy",
    "tightness_check",
    "attack_tightness",
    "build_coin_state",
    "recover_source_states",
    "coin_marginal_a",
]

DIM_E = 4

_KET0 = np.array([1.0, 0.0])
_KET1 = np.array([0.0, 1.0])
_PLUS = np.array([1.0, 1.0]) / math.sqrt(2.0)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2.0)


def _unit(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x < -TOL.domain or x > 1.0 + TOL.domain:
        raise DomainError(f"{name}={x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class AttackParams:
    """Eve's z-marginal fidelity and Bob's z/x trace distances."""

    F_Z: float
    D_Z: float
    D_X: float

    def __post_init__(self) -> None:
        for name in ("F_Z", "D_Z", "D_X"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))
        if self.F_Z > self.D_X + TOL.domain:
            raise DomainError(f"F_Z={self.F_Z} exceeds D_X={self.D_X}")


@dataclass(frozen=True)
class AttackStates:
    alpha: JointState
    alpha_prime: JointState
    beta: JointState
    beta_prime: JointState

    def as_tuple(self) -> tuple[JointState, JointState, JointState, JointState]:
        return (self.alpha, self.alpha_prime, self.beta, self.beta_prime)

    def relation_deviation(self) -> float:
        """Largest violation of the overlap relations of the optimal family.

        The relations are ``<a|a'> = <b|b'> = 0`` and
        ``<a|b> = <a'|b> = <a|b'> = -<a'|b'>``.
        """
        a, ap, b, bp = self.as_tuple()
        ab = a.inner(b)
        devs = [
            abs(a.inner(ap)),
            abs(b.inner(bp)),
            abs(ap.inner(b) - ab),
            abs(a.inner(bp) - ab),
            abs(-ap.inner(bp) - ab),
        ]
        return max(devs)


class Marginals(NamedTuple):
    rho0_E: np.ndarray
    rho1_E: np.ndarray
    sigma0_B: np.ndarray
    sigma1_B: np.ndarray
    rho0_B: np.ndarray
    rho1_B: np.ndarray


def _eve_vectors(F: float) -> dict[str, np.ndarray]:
    s = math.sqrt((1.0 - F) * (1.0 + F))
    cp = math.sqrt((1.0 + F) / 2.0)
    cm = math.sqrt((1.0 - F) / 2.0)
    e = np.eye(DIM_E)
    return {
        "psi0": e[0],
        "psi0p": F * e[0] + s * e[1],
        "psi1": e[2],
        "psi1p": F * e[2] + s * e[3],
        # (psi_k +- psi_k') / sqrt(2 +- 2F), written so that F = 1 stays finite
        "psi0+": cp * e[0] + cm * e[1],
        "psi0-": cm * e[0] - cp * e[1],
        "psi1+": cp * e[2] + cm * e[3],
        "psi1-": cm * e[2] - cp * e[3],
    }


def _state(*terms: tuple[float, np.ndarray, np.ndarray]) -> JointState:
    amps = sum(c * np.kron(b, e) for c, b, e in terms)
    return JointState(amps, dim_b=2, dim_e=DIM_E)


def build_attack(p: AttackParams) -> AttackStates:
    """Source states and Eve's optimal interaction for the given parameters."""
    F, Dz, Dx = p.F_Z, p.D_Z, p.D_X
    v = _eve_vectors(F)
    zp, zm = math.sqrt((1.0 + Dz) / 2.0), math.sqrt((1.0 - Dz) / 2.0)
    xp, xm = math.sqrt((1.0 + Dx) / 2.0), math.sqrt((1.0 - Dx) / 2.0)

    alpha = _state((zp, _KET0, v["psi0"]), (zm, _KET1, v["psi1p"]))
    alpha_p = _state((zm, _KET0, v["psi1"]), (zp, _KET1, v["psi0p"]))

    def beta_k(k: int) -> np.ndarray:
        return xp * np.kron(_PLUS, v[f"psi{k}+"]) + xm * np.kron(_MINUS, v[f"psi{k}-"])

    def beta_pk(k: int) -> np.ndarray:
        return xm * np.kron(_PLUS, v[f"psi{k}-"]) + xp * np.kron(_MINUS, v[f"psi{k}+"])

    beta = JointState(zp * beta_k(0) + zm * beta_k(1), dim_e=DIM_E)
    beta_p = JointState(zp * beta_pk(0) - zm * beta_pk(1), dim_e=DIM_E)
    return AttackStates(alpha, alpha_p, beta, beta_p)


def attack_theta(p: AttackParams) -> float:
    """Source angle saturated by the attack: ``sin(theta) = F D + sqrt(1-F^2) sqrt(1-D^2)``.

    Evaluated as ``pi/2 - arccos(F) + arccos(D)``, which avoids the
    cancellation in recovering ``cos(theta)`` near ``theta = pi/2``.
    """
    return min(max(math.pi / 2 - math.acos(p.F_Z) + math.acos(p.D_X), 0.0), math.pi / 2)


def characterisation_rhs(s: AttackStates) -> float:
    """``(1/2)|<a|b> + <a'|b> + <a|b'> - <a'|b'>|``, which equals ``sqrt(1 + |sin theta|)``."""
    a, ap, b, bp = s.as_tuple()
    return 0.5 * abs(a.inner(b) + ap.inner(b) + a.inner(bp) - ap.inner(bp))


def realised_theta(s: AttackStates) -> float:
    """Source angle defined by the states' overlaps.

    Ill-conditioned near ``pi/2``; compare in ``sqrt(1 + sin theta)`` space
    when precision matters.
    """
    rhs = characterisation_rhs(s)
    if rhs < 1.0 - TOL.theta_match:
        raise CharacterisationError(f"overlap combination {rhs:.12g} is below 1")
    return math.asin(min(max(rhs * rhs - 1.0, 0.0), 1.0))


def marginals(s: AttackStates) -> Marginals:
    return Marginals(
        rho0_E=partial_trace(s.alpha, "E"),
        rho1_E=partial_trace(s.alpha_prime, "E"),
        sigma0_B=partial_trace(s.beta, "B"),
        sigma1_B=partial_trace(s.beta_prime, "B"),
        rho0_B=partial_trace(s.alpha, "B"),
        rho1_B=partial_trace(s.alpha_prime, "B"),
    )


def _expect(rho: np.ndarray, ket: np.ndarray) -> float:
    return float(np.real(ket.conj() @ rho @ ket))


def error_rates(s: AttackStates) -> tuple[float, float]:
    """z- and x-basis error rates when Bob measures ideal sigma_z and sigma_x."""
    m = marginals(s)
    dz = 0.5 * (_expect(m.rho0_B, _KET1) + _expect(m.rho1_B, _KET0))
    dx = 0.5 * (_expect(m.sigma0_B, _MINUS) + _expect(m.sigma1_B, _PLUS))
    return dz, dx


def mixture_entropy(s: AttackStates, p: float) -> float:
    """Numerical ``S(p rho0_E + (1-p) rho1_E)``."""
    m = marginals(s)
    return von_neumann_entropy(p * m.rho0_E + (1.0 - p) * m.rho1_E)


def closed_form_mixture_entropy(params: AttackParams, p: float) -> float:
    """``h((1+D_Z)/2) + h(1/2 + sqrt(1 - 4pq(1-F_Z^2))/2)`` for the constructed family."""
    q = 1.0 - p
    F = params.F_Z
    root = math.sqrt(max(1.0 - 4.0 * p * q * (1.0 - F * F), 0.0))
    return binary_entropy(0.5 + 0.5 * params.D_Z) + binary_entropy(0.5 + 0.5 * root)


def exact_conditional_entropy(s: AttackStates, eta: EtaLike) -> float:
    """H(Z|E) evaluated on the classical-quantum state after Alice's bit flips."""
    eta = _eta(eta)
    m = marginals(s)
    r0 = (1.0 - eta) * m.rho0_E + eta * m.rho1_E
    r1 = eta * m.rho0_E + (1.0 - eta) * m.rho1_E
    mid = 0.5 * (m.rho0_E + m.rho1_E)
    return 1.0 + 0.5 * (von_neumann_entropy(r0) + von_neumann_entropy(r1)) - von_neumann_entropy(mid)


@dataclass(frozen=True)
class TightnessReport:
    theta: float
    theta_realised: float
    characterisation_gap: float
    H_exact: float
    H_bound: float
    rate_exact: float
    rate_bound: float

    @property
    def max_abs_gap(self) -> float:
        return max(abs(self.H_exact - self.H_bound), abs(self.rate_exact - self.rate_bound))


def _tightness(theta: float, states: AttackStates, delta_z: float, delta_x: float,
               eta: float) -> TightnessReport:
    gap = abs(characterisation_rhs(states) - math.sqrt(1.0 + math.sin(theta)))
    if gap > TOL.theta_match:
        raise InfeasibleError(f"attack realises a different source angle (gap {gap:.3g})")
    params = ProtocolParams(theta, delta_z, delta_x)
    H_exact = exact_conditional_entropy(states, eta)
    dz_num, _ = error_rates(states)
    dz_tilde = (1.0 - eta) * dz_num + eta * (1.0 - dz_num)
    return TightnessReport(
        theta=theta,
        theta_realised=realised_theta(states),
        characterisation_gap=gap,
        H_exact=H_exact,
        H_bound=cond_entropy_bound(fidelity_bound(params), eta),
        rate_exact=H_exact - binary_entropy(min(max(dz_tilde, 0.0), 1.0)),
        rate_bound=rate_bound(params, eta),
    )


def tightness_check(theta: float, delta_z: float, delta_x: float, eta: EtaLike) -> TightnessReport:
    """Build the optimal attack for ``(theta, delta_z, delta_x)`` and compare rates.

    The attack uses ``D_Z = 1 - 2 delta_z``, ``D_X = 1 - 2 delta_x`` and
    ``F_Z = f_theta(D_X)``.  Inside the zero plateau of ``f_theta`` no member
    of the family realises ``theta`` and :class:`InfeasibleError` is raised.
    """
    params = ProtocolParams(theta, delta_z, delta_x)
    eta = _eta(eta)
    D_X = 1.0 - 2.0 * params.delta_x
    if D_X < abs(math.cos(params.theta)) - TOL.theta_match:
        raise InfeasibleError(f"D_X={D_X:.6g} lies on the zero plateau of the fidelity bound")
    ap = AttackParams(f_theta(params.theta, D_X), 1.0 - 2.0 * params.delta_z, D_X)
    return _tightness(params.theta, build_attack(ap), params.delta_z, params.delta_x, eta)


def attack_tightness(p: AttackParams, eta: EtaLike) -> TightnessReport:
    """Tightness report for an attack given directly by its parameters."""
    theta = attack_theta(p)
    return _tightness(theta, build_attack(p), (1.0 - p.D_Z) / 2.0, (1.0 - p.D_X) / 2.0, _eta(eta))


@dataclass(frozen=True, eq=False)
class CoinState:
    """Joint state on Alice's 4-level coin, Bob and Eve (``A (x) B (x) E``).

    Alice's basis ``|00>, |01>, |10>, |11>`` selects ``alpha, alpha', beta, beta'``.
    """

    amplitudes: np.ndarray
    epsilon: float
    dim_be: int = 2 * DIM_E

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != 4 * self.dim_be:
            raise DomainError(f"expected {4 * self.dim_be} amplitudes, got {amps.size}")
        if abs(np.linalg.norm(amps) - 1.0) > TOL.norm:
            raise DomainError("coin state is not normalised")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "epsilon", _unit(self.epsilon, "epsilon"))

    def branch(self, a: int) -> np.ndarray:
        """``(<a|_A (x) 1_BE) |Psi>``, unnormalised."""
        return self.amplitudes.reshape(4, self.dim_be)[a]


def coin_amplitudes(epsilon: float) -> np.ndarray:
    z = math.sqrt((1.0 - epsilon) / 2.0)
    x = math.sqrt(epsilon / 2.0)
    return np.array([z, z, x, x])


def build_coin_state(s: AttackStates, epsilon: float) -> CoinState:
    """Entangled coin state whose A-measurement prepares the four source states."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside (0, 1)")
    c = coin_amplitudes(epsilon)
    states = s.as_tuple()
    dim_be = states[0].amplitudes.size
    amps = np.concatenate([c[i] * states[i].amplitudes for i in range(4)])
    return CoinState(amps, epsilon, dim_be=dim_be)


def recover_source_states(c: CoinState, dim_e: int = DIM_E) -> AttackStates:
    """Project onto each coin basis vector and renormalise by its amplitude."""
    expected = coin_amplitudes(c.epsilon)
    states = []
    for a in range(4):
        branch = c.branch(a)
        amp = float(np.linalg.norm(branch))
        if amp <= TOL.norm or expected[a] == 0.0:
            raise DegenerateAmplitudeError(f"coin branch {a:02b} has zero amplitude")
        states.append(JointState(branch / amp, dim_b=c.dim_be // dim_e, dim_e=dim_e))
    return AttackStates(*states)


def coin_marginal_a(c: CoinState) -> np.ndarray:
    """Alice's reduced state ``Tr_BE |Psi><Psi|``."""
    psi = c.amplitudes.reshape(4, c.dim_be)
    return psi @ psi.conj().T
