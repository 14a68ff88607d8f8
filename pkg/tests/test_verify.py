import json
import math

import pytest

from bb84rate.attack import AttackParams
from bb84rate.verify import (
    VerificationReport,
    check_coin_roundtrip,
    check_convexity,
    check_entropy_identity,
    check_expansion,
    check_expansion_root,
    check_tightness_grid,
    check_tightness_random,
    default_grid,
    run_suite,
)


def test_default_grid_shape():
    g = default_grid()
    assert len(g) == 36
    assert all(p.F_Z <= p.D_X for p in g)


class TestConvexity:
    def test_flat_case(self):
        rep = check_convexity([0.5])
        assert rep.passed and rep.worst_violation == 0.0
        assert rep.details["worst_first_difference"] == 0.0
        assert rep.details["slope_at_zero_ratio"] == 0.0

    def test_eta_zero(self):
        assert check_convexity([0.0], f_grid_step=1e-3).passed

    def test_default(self):
        rep = check_convexity()
        assert rep.passed and rep.tolerance == 1e-6
        assert rep.worst_violation >= 0

    @pytest.mark.parametrize("step", [0.0, -1e-4, 0.1])
    def test_step_validation(self, step):
        with pytest.raises(ValueError):
            check_convexity([0.1], f_grid_step=step)


class TestExpansion:
    def test_spread(self):
        rep = check_expansion(math.pi / 2, 0.12)
        assert rep.passed and rep.worst_violation < 4

    def test_sign_near_no_lr_threshold(self):
        assert check_expansion(math.pi / 2, 0.11, [0.05]).details["K"] > 0

    def test_coefficient_vanishes_at_lr_threshold(self):
        assert abs(check_expansion(math.pi / 2, 0.124120).details["K"]) <= 5e-4

    def test_plateau_skipped(self):
        rep = check_expansion(math.pi / 2, 0.5)
        assert rep.skipped and rep.passed

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            check_expansion(math.pi / 2, 0.12, [0.3])

    @pytest.mark.parametrize("deg", [90, 70, 45])
    def test_root(self, deg):
        rep = check_expansion_root(math.radians(deg))
        assert rep.passed and rep.worst_violation <= 5e-4


class TestTightnessChecks:
    def test_grid(self):
        rep = check_tightness_grid()
        assert rep.points == 144 and rep.passed

    def test_single_points(self):
        assert check_tightness_grid([AttackParams(1.0, 1.0, 1.0)], [0.0]).passed
        assert check_tightness_grid([AttackParams(0.0, 1.0, 1.0)], [0.0]).passed

    def test_random_records_seed(self):
        rep = check_tightness_random(7, n=10)
        assert rep.passed and rep.details["seed"] == 7

    def test_entropy_identity(self):
        assert check_entropy_identity().passed

    def test_coin(self):
        assert check_coin_roundtrip().passed


class TestSuite:
    def test_all_pass_and_deterministic(self):
        a = [r.to_dict() for r in run_suite("all", seed=42)]
        b = [r.to_dict() for r in run_suite("all", seed=42)]
        assert a == b
        assert all(r["passed"] for r in a)
        json.dumps(a)

    def test_subsets(self):
        assert [r.name for r in run_suite("convexity")] == ["convexity"]
        assert len(run_suite("expansion")) == 2

    def test_unknown(self):
        with pytest.raises(ValueError):
            run_suite("everything")

    def test_text(self):
        rep = VerificationReport("x", 3, 0.5, 1.0, False)
        assert rep.to_text().startswith("FAIL x: points=3")

    def test_infinite_violation_serialises(self):
        rep = VerificationReport("x", 1, math.inf, 1.0, False)
        assert rep.to_dict()["worst_violation"] is None
