"""Optimisation over the flip fraction, threshold error rates and sweeps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .config import TOL
from .errors import ConvergenceError, DomainError, NoKeyError
from .keyrate import (
    KeyRateReport,
    NoiseFraction,
    ProtocolParams,
    clamp_rate,
    f_theta,
    fidelity_bound,
    rate_bound,
    threshold_root_expression,
)
from .solvers import bisect, golden_max

__all__ = [
    "ThresholdResult",
    "SweepSpec",
    "SweepResult",
    "optimize_eta",
    "threshold_without_lr",
    "threshold_with_lr",
    "thresholds",
    "sweep",
]

log = logging.getLogger(__name__)

MAX_SWEEP_POINTS = 10**7


def optimize_eta(params: ProtocolParams) -> KeyRateReport:
    """Maximise the key rate over the flip fraction ``eta`` in ``[0, 1/2]``.

    A coarse grid guards against multiple local maxima before golden-section
    refinement around the best grid point.
    """
    n = TOL.eta_grid_points
    grid = np.linspace(0.0, 0.5, n)
    values = [rate_bound(params, float(e)) for e in grid]
    i = int(np.argmax(values))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n - 1)])
    eta, rate = golden_max(lambda e: rate_bound(params, e), lo, hi)
    if values[i] > rate:
        eta, rate = float(grid[i]), values[i]
    return KeyRateReport(params, rate, NoiseFraction(eta), fidelity_bound(params))


def _plateau_edge(theta: float) -> float:
    return 0.5 * (1.0 - abs(math.cos(theta)))


def _rate_no_lr(theta: float, delta: float) -> float:
    return rate_bound(ProtocolParams.symmetric(theta, delta), 0.0)


def threshold_without_lr(theta: float) -> float:
    """Symmetric error rate at which the rate without randomisation hits zero."""
    if _rate_no_lr(theta, 0.0) <= 0.0:
        raise NoKeyError(f"no key at zero error rate for theta={theta!r}")
    edge = _plateau_edge(theta)
    return bisect(lambda d: _rate_no_lr(theta, d), 0.0, edge)


def _root_expr(theta: float, delta: float) -> float:
    F = f_theta(theta, 1.0 - 2.0 * delta)
    if F <= 0.0:
        return 0.0
    return threshold_root_expression(F, delta)


def threshold_with_lr(theta: float, lower: float | None = None) -> float:
    """Symmetric threshold error rate with optimal local randomisation.

    The root expression also vanishes where the fidelity bound hits its zero
    plateau; that spurious root is avoided by bracketing strictly inside
    ``(threshold_without_lr, plateau edge)``.
    """
    lo = threshold_without_lr(theta) if lower is None else lower
    edge = _plateau_edge(theta)
    if _root_expr(theta, lo) >= 0.0:
        raise ConvergenceError(f"root expression not negative at lower bracket {lo!r}")
    hi = None
    for k in range(1, 64):
        cand = edge - (edge - lo) * 2.0**-k
        if f_theta(theta, 1.0 - 2.0 * cand) > 0.0 and _root_expr(theta, cand) > 0.0:
            hi = cand
            break
    if hi is None:
        raise ConvergenceError(f"no upper bracket found below plateau edge {edge!r}")
    return bisect(lambda d: _root_expr(theta, d), lo, hi)


@dataclass(frozen=True)
class ThresholdResult:
    theta: float
    threshold_without_lr: float
    threshold_with_lr: float

    @property
    def relative_improvement(self) -> float:
        return self.threshold_with_lr / self.threshold_without_lr - 1.0

    @property
    def improvement_percent(self) -> float:
        return round(100.0 * self.relative_improvement, 2)


def thresholds(theta: float) -> ThresholdResult:
    without = threshold_without_lr(theta)
    return ThresholdResult(theta, without, threshold_with_lr(theta, lower=without))


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.

    ``delta_symmetric`` sweeps the common error rate at fixed ``theta``
    (radians).  ``theta`` sweeps take start/stop/step in degrees, matching
    the abscissa of the emitted rows.
    """

    variable: Literal["delta_symmetric", "theta"]
    start: float
    stop: float
    step: float
    theta: float = math.pi / 2
    optimize_eta: bool = True

    def __post_init__(self) -> None:
        if self.variable not in ("delta_symmetric", "theta"):
            raise DomainError(f"unknown sweep variable {self.variable!r}")
        if not self.step > 0.0:
            raise DomainError("step must be positive")
        if self.start > self.stop:
            raise DomainError("start must not exceed stop")
        if (self.stop - self.start) / self.step > MAX_SWEEP_POINTS:
            raise DomainError("too many sweep points")

    def abscissae(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [round(self.start + i * self.step, 12) for i in range(n + 1)]

    @property
    def columns(self) -> tuple[str, ...]:
        if self.variable == "theta":
            return ("theta_deg", "threshold_without_lr", "threshold_with_lr")
        if self.optimize_eta:
            return ("delta", "rate_without_lr", "rate_with_lr")
        return ("delta", "rate_without_lr")


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[tuple[float, ...]] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return self.spec.columns


def _sweep_row(spec: SweepSpec, x: float) -> tuple[float, ...]:
    if spec.variable == "theta":
        res = thresholds(math.radians(x))
        return (x, res.threshold_without_lr, res.threshold_with_lr)
    params = ProtocolParams.symmetric(spec.theta, x)
    row = (x, clamp_rate(rate_bound(params, 0.0)))
    if spec.optimize_eta:
        row += (optimize_eta(params).clamped_rate,)
    return row


def sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every sweep point; rates are clamped at zero for presentation.

    Points that fail (no key, domain error) are omitted and recorded in
    ``failures``.
    """
    result = SweepResult(spec)
    for x in spec.abscissae():
        try:
            result.rows.append(_sweep_row(spec, x))
        except (NoKeyError, DomainError, ConvergenceError) as exc:
            result.failures.append((x, str(exc)))
    if result.failures:
        log.warning("%d sweep points omitted", len(result.failures))
    return result
