"""Numerical checks tying the closed-form bounds to the explicit attacks.

Every check is deterministic.  Random grids take an explicit seed, which is
recorded in the report.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .analysis import threshold_with_lr, threshold_without_lr
from .attack import (
    AttackParams,
    attack_tightness,
    build_attack,
    build_coin_state,
    closed_form_mixture_entropy,
    mixture_entropy,
    recover_source_states,
)
from .keyrate import (
    ProtocolParams,
    cond_entropy_bound,
    expansion_coefficient,
    f_theta,
    rate_bound,
)
from .solvers import bisect

__all__ = [
    "VerificationReport",
    "SUITES",
    "default_grid",
    "check_convexity",
    "check_expansion",
    "check_expansion_root",
    "check_tightness_grid",
    "check_tightness_random",
    "check_entropy_identity",
    "check_coin_roundtrip",
    "run_suite",
]

SUITES = ("convexity", "expansion", "tightness", "all")

DEFAULT_ETAS = (0.0, 0.1, 0.3, 0.5)
CONVEXITY_ETAS = (0.05, 0.1, 0.25, 0.4)
EXPANSION_EPS = (0.02, 0.04, 0.08)

TIGHTNESS_TOL = 1e-9
CONVEXITY_TOL = 1e-6
MONOTONE_TOL = 1e-10
SLOPE_AT_ZERO_C = 10.0
EXPANSION_SPREAD = 4.0
EXPANSION_ROOT_TOL = 5e-4
ROUNDTRIP_TOL = 1e-12


@dataclass
class VerificationReport:
    name: str
    points: int
    worst_violation: float
    tolerance: float
    passed: bool
    skipped: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.worst_violation = float(self.worst_violation)
        self.passed = bool(self.passed)
        self.details = {k: _plain(v) for k, v in self.details.items()}

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        if math.isinf(d["worst_violation"]):
            d["worst_violation"] = None
        return d

    def to_text(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        line = (f"{status} {self.name}: points={self.points} "
                f"worst={self.worst_violation:.3e} tol={self.tolerance:.1e}")
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"{line} {extra}".rstrip()


def _plain(v: Any) -> Any:
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def default_grid() -> list[AttackParams]:
    """``F_Z in {0, .3, .7, 1}``, ``D_X in {F_Z, (1+F_Z)/2, 1}``, ``D_Z in {.2, .8, 1}``."""
    grid = []
    for F in (0.0, 0.3, 0.7, 1.0):
        for Dx in (F, (1.0 + F) / 2.0, 1.0):
            for Dz in (0.2, 0.8, 1.0):
                grid.append(AttackParams(F, Dz, Dx))
    return grid


def check_convexity(eta_samples: Iterable[float] = CONVEXITY_ETAS,
                    f_grid_step: float = 1e-4) -> VerificationReport:
    """Finite-difference convexity and monotonicity of the entropy bound in F.

    Second differences are taken on ``[0.01, 0.99]`` because the curvature of
    ``phi`` diverges at ``F = 1``; monotonicity covers all of ``[0, 1]``.
    """
    h = float(f_grid_step)
    if not 0.0 < h <= 1e-2:
        raise ValueError("f_grid_step must lie in (0, 1e-2]")
    etas = [float(e) for e in eta_samples]
    n_full = int(round(1.0 / h))
    full = np.linspace(0.0, 1.0, n_full + 1)
    lo, hi = int(round(0.01 / h)), int(round(0.99 / h))
    worst_d2 = worst_d1 = worst_slope = 0.0
    points = 0
    for eta in etas:
        H = np.array([cond_entropy_bound(F, eta) for F in full])
        d1 = np.diff(H)
        d2 = (H[lo + 1:hi + 2] - 2.0 * H[lo:hi + 1] + H[lo - 1:hi]) / (h * h)
        worst_d2 = max(worst_d2, float(max(-d2.min(), 0.0)))
        worst_d1 = max(worst_d1, float(max(-d1.min(), 0.0)))
        worst_slope = max(worst_slope, abs(H[1] - H[0]) / (h * h))
        points += full.size
    passed = worst_d2 <= CONVEXITY_TOL and worst_d1 <= MONOTONE_TOL and worst_slope <= SLOPE_AT_ZERO_C
    return VerificationReport(
        name="convexity",
        points=points,
        worst_violation=worst_d2,
        tolerance=CONVEXITY_TOL,
        passed=passed,
        details={
            "etas": etas,
            "step": h,
            "worst_first_difference": worst_d1,
            "first_difference_tol": MONOTONE_TOL,
            "slope_at_zero_ratio": worst_slope,
            "slope_at_zero_bound": SLOPE_AT_ZERO_C,
        },
    )


def check_expansion(theta: float, delta: float,
                    eps_list: Sequence[float] = EXPANSION_EPS) -> VerificationReport:
    """Compare the rate at ``eta = (1-eps)/2`` with its leading term ``K eps^2``.

    The remainder divided by ``eps^4`` should be roughly constant; the report
    fails when its spread (max/min) reaches a factor of four.
    """
    name = f"expansion(theta={math.degrees(theta):.6g}deg, delta={delta:.6g})"
    F = f_theta(theta, 1.0 - 2.0 * delta)
    if not 0.0 < F < 1.0:
        return VerificationReport(name, 0, 0.0, EXPANSION_SPREAD, passed=True, skipped=True,
                                  details={"reason": "fidelity bound on plateau or at 1"})
    params = ProtocolParams.symmetric(theta, delta)
    K = expansion_coefficient(F, delta)
    consts = []
    for eps in eps_list:
        if not 0.0 < eps <= 0.2:
            raise ValueError(f"eps={eps!r} outside (0, 0.2]")
        r = rate_bound(params, (1.0 - eps) / 2.0)
        consts.append(abs(r - K * eps * eps) / eps**4)
    spread = max(consts) / min(consts) if min(consts) > 0.0 else math.inf
    return VerificationReport(
        name=name,
        points=len(consts),
        worst_violation=spread,
        tolerance=EXPANSION_SPREAD,
        passed=spread < EXPANSION_SPREAD,
        details={"K": K, "fitted_C": max(consts), "remainder_over_eps4": consts},
    )


def check_expansion_root(theta: float) -> VerificationReport:
    """Root in delta of the leading coefficient ``K`` vs the LR threshold."""
    lo = threshold_without_lr(theta)
    edge = 0.5 * (1.0 - abs(math.cos(theta)))

    def K(d: float) -> float:
        F = f_theta(theta, 1.0 - 2.0 * d)
        return expansion_coefficient(F, d)

    hi = edge - (edge - lo) * 1e-6
    root = bisect(K, lo, hi)
    ref = threshold_with_lr(theta)
    gap = abs(root - ref)
    return VerificationReport(
        name=f"expansion_root(theta={math.degrees(theta):.6g}deg)",
        points=1,
        worst_violation=gap,
        tolerance=EXPANSION_ROOT_TOL,
        passed=gap <= EXPANSION_ROOT_TOL,
        details={"coefficient_root": root, "threshold_with_lr": ref},
    )


def _tightness_report(name: str, pairs: Iterable[tuple[AttackParams, float]],
                      details: dict[str, Any]) -> VerificationReport:
    worst = 0.0
    n = 0
    for p, eta in pairs:
        rep = attack_tightness(p, eta)
        worst = max(worst, rep.max_abs_gap, rep.characterisation_gap)
        n += 1
    return VerificationReport(name, n, worst, TIGHTNESS_TOL, worst <= TIGHTNESS_TOL, details=details)


def check_tightness_grid(grid: Sequence[AttackParams] | None = None,
                         etas: Sequence[float] = DEFAULT_ETAS) -> VerificationReport:
    """Exact Devetak-Winter rate of each constructed attack vs the analytic bound."""
    grid = default_grid() if grid is None else list(grid)
    pairs = [(p, eta) for p in grid for eta in etas]
    return _tightness_report("tightness_grid", pairs, {"etas": list(etas)})


def check_tightness_random(seed: int, n: int = 50) -> VerificationReport:
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        F, Dx = sorted(rng.uniform(0.0, 1.0, size=2))
        p = AttackParams(float(F), float(rng.uniform(0.0, 1.0)), float(Dx))
        pairs.append((p, float(rng.uniform(0.0, 0.5))))
    return _tightness_report("tightness_random", pairs, {"seed": seed})


def check_entropy_identity(grid: Sequence[AttackParams] | None = None,
                           ps: Sequence[float] = (0.1, 0.3, 0.5)) -> VerificationReport:
    """Eigensolver entropy of ``p rho0_E + q rho1_E`` vs its two-term closed form."""
    grid = default_grid() if grid is None else list(grid)
    worst = 0.0
    for params in grid:
        s = build_attack(params)
        for p in ps:
            worst = max(worst, abs(mixture_entropy(s, p) - closed_form_mixture_entropy(params, p)))
    n = len(grid) * len(ps)
    return VerificationReport("entropy_identity", n, worst, TIGHTNESS_TOL, worst <= TIGHTNESS_TOL,
                              details={"ps": list(ps)})


def check_coin_roundtrip(grid: Sequence[AttackParams] | None = None,
                         eps_list: Sequence[float] = (0.1, 0.5)) -> VerificationReport:
    grid = default_grid() if grid is None else list(grid)
    worst = 0.0
    for params in grid:
        s = build_attack(params)
        for eps in eps_list:
            back = recover_source_states(build_coin_state(s, eps))
            for x, y in zip(s.as_tuple(), back.as_tuple()):
                worst = max(worst, float(np.max(np.abs(x.amplitudes - y.amplitudes))))
    n = len(grid) * len(eps_list)
    return VerificationReport("coin_roundtrip", n, worst, ROUNDTRIP_TOL, worst <= ROUNDTRIP_TOL,
                              details={"epsilons": list(eps_list)})


def run_suite(suite: str, seed: int = 0) -> list[VerificationReport]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    reports: list[VerificationReport] = []
    if suite in ("convexity", "all"):
        reports.append(check_convexity())
    if suite in ("expansion", "all"):
        reports.append(check_expansion(math.pi / 2, 0.12))
        reports.append(check_expansion_root(math.pi / 2))
    if suite in ("tightness", "all"):
        reports.append(check_tightness_grid())
        reports.append(check_tightness_random(seed))
        reports.append(check_entropy_identity())
        reports.append(check_coin_roundtrip())
    return reports
