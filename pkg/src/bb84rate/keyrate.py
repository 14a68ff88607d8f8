"""Closed-form entropy and key-rate expressions.

All functions here are scalar and pure.  Rates are returned raw and may be
negative; clamping to zero is left to reporting code so that root finders
can see the sign.

Base-2 logarithms are used throughout unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .config import TOL
from .errors import DomainError

__all__ = [
    "ProtocolParams",
    "NoiseFraction",
    "KeyRateReport",
    "clamp_rate",
    "binary_entropy",
    "phi",
    "cond_entropy_bound",
    "noisy_error_entropy",
    "rate_from_fidelity",
    "f_theta",
    "fidelity_bound",
    "rate_bound",
    "threshold_root_expression",
    "expansion_coefficient",
]

_LN2 = math.log(2.0)


def _check_interval(name: str, x: float, lo: float, hi: float) -> float:
    x = float(x)
    if math.isnan(x) or x < lo - TOL.domain or x > hi + TOL.domain:
        raise DomainError(f"{name}={x!r} outside [{lo}, {hi}]")
    return min(max(x, lo), hi)


@dataclass(frozen=True)
class ProtocolParams:
    """Source angle ``theta`` (radians) and the z/x-basis error rates."""

    theta: float
    delta_z: float
    delta_x: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _check_interval("theta", self.theta, 0.0, math.pi / 2))
        object.__setattr__(self, "delta_z", _check_interval("delta_z", self.delta_z, 0.0, 0.5))
        object.__setattr__(self, "delta_x", _check_interval("delta_x", self.delta_x, 0.0, 0.5))

    @classmethod
    def from_degrees(cls, theta_deg: float, delta_z: float, delta_x: float) -> "ProtocolParams":
        return cls(math.radians(theta_deg), delta_z, delta_x)

    @classmethod
    def symmetric(cls, theta: float, delta: float) -> "ProtocolParams":
        return cls(theta, delta, delta)

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


@dataclass(frozen=True)
class NoiseFraction:
    """Fraction of key bits Alice flips before error correction.

    The key rate is symmetric under ``eta -> 1 - eta`` so values above 1/2
    are folded back into ``[0, 1/2]``.
    """

    eta: float

    def __post_init__(self) -> None:
        eta = _check_interval("eta", self.eta, 0.0, 1.0)
        if eta > 0.5:
            eta = 1.0 - eta
        object.__setattr__(self, "eta", eta)

    def __float__(self) -> float:
        return self.eta


EtaLike = Union[float, NoiseFraction]


def _eta(eta: EtaLike) -> float:
    if isinstance(eta, NoiseFraction):
        return eta.eta
    return _check_interval("eta", eta, 0.0, 1.0)


@dataclass(frozen=True)
class KeyRateReport:
    """Key rate for one parameter point.

    ``rate`` is the raw bound and can be negative; ``clamped_rate`` is what
    gets presented.  Positive values below ``TOL.rate_floor`` are round-off
    from evaluating the rate near ``eta = 1/2`` and are presented as zero.
    """

    params: ProtocolParams
    rate: float
    eta_opt: NoiseFraction
    fidelity_bound: float

    @property
    def clamped_rate(self) -> float:
        return clamp_rate(self.rate)

    @property
    def clamped(self) -> bool:
        return self.clamped_rate != self.rate


def clamp_rate(rate: float) -> float:
    """Presentation value of a raw rate: negatives and round-off become 0."""
    return rate if rate > TOL.rate_floor else 0.0


def binary_entropy(p: float) -> float:
    """Binary Shannon entropy in bits, with ``h(0) = h(1) = 0``."""
    p = _check_interval("p", p, 0.0, 1.0)
    if p == 0.0 or p == 1.0:
        return 0.0
    q = 1.0 - p
    return -p * math.log2(p) - q * math.log2(q)


def phi(x: float) -> float:
    """``h(1/2 + x/2)``, evaluated without forming ``1/2 + x/2``.

    Writing it in terms of ``1 +- x`` keeps full precision near ``|x| = 1``.
    """
    x = _check_interval("x", x, -1.0, 1.0)
    a = abs(x)
    if a == 1.0:
        return 0.0
    if a == 0.0:
        return 1.0
    return 1.0 - 0.5 * ((1.0 + a) * math.log2(1.0 + a) + (1.0 - a) * math.log2(1.0 - a))


def cond_entropy_bound(F: float, eta: EtaLike) -> float:
    """Lower bound on H(Z|E) in terms of Eve's z-marginal fidelity ``F``.

    Returns ``1 - phi(F) + phi(R)`` with ``R = sqrt((1-2 eta)^2 + 4 eta (1-eta) F^2)``,
    which equals the square root appearing in the bound.
    """
    F = _check_interval("F", F, 0.0, 1.0)
    eta = _eta(eta)
    lam = (1.0 - 2.0 * eta) ** 2
    mu = 4.0 * eta * (1.0 - eta)
    R = math.sqrt(min(lam + mu * F * F, 1.0))
    # grouped so that eta = 1/2 (R == F) gives exactly 1
    return 1.0 + (phi(R) - phi(F))


def noisy_error_entropy(delta_z: float, eta: EtaLike) -> float:
    """``h((1-eta) delta_z + eta (1-delta_z))``.

    Uses ``1/2 - noisy rate = (1-2 eta)(1/2 - delta_z)`` so the result is
    exactly 1 at ``eta = 1/2``.
    """
    delta_z = _check_interval("delta_z", delta_z, 0.0, 1.0)
    eta = _eta(eta)
    return phi((1.0 - 2.0 * eta) * (1.0 - 2.0 * delta_z))


def rate_from_fidelity(F_bound: float, delta_z: float, eta: EtaLike) -> float:
    """Key-rate bound given a lower bound on Eve's fidelity.  May be negative."""
    delta_z = _check_interval("delta_z", delta_z, 0.0, 0.5)
    eta = _eta(eta)
    return cond_entropy_bound(F_bound, eta) - noisy_error_entropy(delta_z, eta)


def f_theta(theta: float, x: float) -> float:
    """Fidelity lower bound as a function of Bob's x-basis trace distance ``x``.

    Zero on the plateau ``x <= |cos(theta)|``.
    """
    x = _check_interval("x", x, 0.0, 1.0)
    s = abs(math.sin(theta))
    c = abs(math.cos(theta))
    if x <= c:
        return 0.0
    return max(s * x - c * math.sqrt((1.0 - x) * (1.0 + x)), 0.0)


def fidelity_bound(params: ProtocolParams) -> float:
    return f_theta(params.theta, abs(1.0 - 2.0 * params.delta_x))


def rate_bound(params: ProtocolParams, eta: EtaLike) -> float:
    """Key rate with local randomisation for the characterised source.

    At ``eta = 0`` this is ``1 - h(1/2 + f/2) - h(delta_z)``.
    """
    return rate_from_fidelity(fidelity_bound(params), params.delta_z, eta)


def threshold_root_expression(F: float, delta_z: float) -> float:
    """``(1-F^2) ln((1+F)/(1-F)) - 2F(1-2 delta_z)^2`` on ``0 < F < 1``.

    Negative values mean the leading small-``eps`` coefficient of the rate at
    ``eta = (1-eps)/2`` is positive, i.e. key can be extracted near
    ``eta = 1/2``.
    """
    F = float(F)
    if not 0.0 < F < 1.0:
        raise DomainError(f"F={F!r} outside the open interval (0, 1)")
    delta_z = _check_interval("delta_z", delta_z, 0.0, 0.5)
    return 2.0 * (1.0 - F * F) * math.atanh(F) - 2.0 * F * (1.0 - 2.0 * delta_z) ** 2


def expansion_coefficient(F: float, delta_z: float) -> float:
    """Coefficient ``K`` in ``rate ~ K eps^2`` for ``eta = (1-eps)/2``.

    ``K = -(1-F^2)/(4F) log2((1+F)/(1-F)) + (1-2 delta_z)^2 / (2 ln 2)``,
    which is ``threshold_root_expression`` times ``-1/(4 F ln 2)``.
    """
    F = float(F)
    if not 0.0 < F < 1.0:
        raise DomainError(f"F={F!r} outside the open interval (0, 1)")
    delta_z = _check_interval("delta_z", delta_z, 0.0, 0.5)
    log2_ratio = 2.0 * math.atanh(F) / _LN2
    return -(1.0 - F * F) / (4.0 * F) * log2_ratio + (1.0 - 2.0 * delta_z) ** 2 / (2.0 * _LN2)
