import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bb84rate.attack import (
    AttackParams,
    CoinState,
    attack_theta,
    attack_tightness,
    build_attack,
    build_coin_state,
    characterisation_rhs,
    closed_form_mixture_entropy,
    coin_marginal_a,
    error_rates,
    exact_conditional_entropy,
    marginals,
    mixture_entropy,
    realised_theta,
    recover_source_states,
    tightness_check,
)
from bb84rate.errors import CharacterisationError, DegenerateAmplitudeError, DomainError, InfeasibleError
from bb84rate.keyrate import cond_entropy_bound
from bb84rate.linalg import JointState, fidelity, trace_distance


def grid():
    for F in (0.0, 0.3, 0.7, 1.0):
        for Dx in (F, (1 + F) / 2, 1.0):
            for Dz in (0.2, 0.8, 1.0):
                yield AttackParams(F, Dz, Dx)


GRID = list(grid())
ETAS = (0.0, 0.1, 0.3, 0.5)


@st.composite
def attack_params(draw):
    F = draw(st.floats(0, 1))
    Dx = draw(st.floats(F, 1))
    return AttackParams(F, draw(st.floats(0, 1)), Dx)


class TestParams:
    def test_requires_F_le_Dx(self):
        with pytest.raises(DomainError):
            AttackParams(0.6, 0.5, 0.5)

    @pytest.mark.parametrize("args", [(-0.1, 0.5, 0.5), (0.1, 1.2, 0.5), (0.1, 0.5, math.nan)])
    def test_ranges(self, args):
        with pytest.raises(DomainError):
            AttackParams(*args)


class TestBuildAttack:
    def test_perfect_copies(self):
        s = build_attack(AttackParams(0.0, 1.0, 1.0))
        a, ap = s.alpha.matrix(), s.alpha_prime.matrix()
        assert np.allclose(a, np.outer([1, 0], [1, 0, 0, 0]))
        assert np.allclose(ap, np.outer([0, 1], [0, 1, 0, 0]))
        # Bob holds |+> and |-> with a common Eve factor
        b, bp = s.beta.matrix(), s.beta_prime.matrix()
        assert np.allclose(b[0], b[1]) and np.allclose(bp[0], -bp[1])
        assert np.allclose(b[0], bp[0])

    @pytest.mark.parametrize("p", GRID, ids=str)
    def test_relations_on_grid(self, p):
        assert build_attack(p).relation_deviation() <= 1e-12

    def test_relations_example(self):
        s = build_attack(AttackParams(0.5, 0.8, 0.9))
        a, ap, b, bp = s.as_tuple()
        assert abs(a.inner(ap)) <= 1e-12 and abs(b.inner(bp)) <= 1e-12
        ref = a.inner(b)
        assert abs(ap.inner(b) - ref) <= 1e-12
        assert abs(a.inner(bp) - ref) <= 1e-12
        assert abs(ap.inner(bp) + ref) <= 1e-12

    @given(attack_params())
    @settings(max_examples=60, deadline=None)
    def test_relations_everywhere(self, p):
        assert build_attack(p).relation_deviation() <= 1e-12


class TestRealisedTheta:
    @pytest.mark.parametrize("d", [0.0, 0.3, 0.9, 1.0])
    def test_ideal_source(self, d):
        s = build_attack(AttackParams(d, 0.5, d))
        assert characterisation_rhs(s) == pytest.approx(math.sqrt(2), abs=1e-12)
        assert realised_theta(s) == pytest.approx(math.pi / 2, abs=1e-6)
        assert attack_theta(AttackParams(d, 0.5, d)) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_perfect_copies(self):
        assert realised_theta(build_attack(AttackParams(0.0, 1.0, 1.0))) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("Dz", [0.0, 0.7, 1.0])
    def test_independent_of_Dz(self, Dz):
        expected = math.asin(0.5 * 0.9 + math.sqrt(0.75) * math.sqrt(0.19))
        assert realised_theta(build_attack(AttackParams(0.5, Dz, 0.9))) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("p", GRID, ids=str)
    def test_rhs_closed_form(self, p):
        F, D = p.F_Z, p.D_X
        expected = (math.sqrt(1 + F) * math.sqrt(1 + D) + math.sqrt(1 - F) * math.sqrt(1 - D)) / math.sqrt(2)
        assert characterisation_rhs(build_attack(p)) == pytest.approx(expected, abs=1e-10)

    def test_rhs_below_one_rejected(self):
        # x-states orthogonal to the z-states make every overlap vanish
        s = build_attack(AttackParams(0.0, 1.0, 1.0))
        e = np.zeros(8)
        e[3] = 1.0
        f = np.zeros(8)
        f[7] = 1.0
        bad = type(s)(s.alpha, s.alpha_prime, JointState(e), JointState(f))
        with pytest.raises(CharacterisationError):
            realised_theta(bad)


class TestMarginals:
    @pytest.mark.parametrize("p", GRID, ids=str)
    def test_reproduce_parameters(self, p):
        m = marginals(build_attack(p))
        assert fidelity(m.rho0_E, m.rho1_E) == pytest.approx(p.F_Z, abs=1e-10)
        assert trace_distance(m.rho0_B, m.rho1_B) == pytest.approx(p.D_Z, abs=1e-10)
        assert trace_distance(m.sigma0_B, m.sigma1_B) == pytest.approx(p.D_X, abs=1e-10)

    def test_bob_z_marginals_diagonal(self):
        m = marginals(build_attack(AttackParams(0.3, 0.6, 0.65)))
        assert np.allclose(m.rho0_B, np.diag([0.8, 0.2]), atol=1e-14)
        assert np.allclose(m.rho1_B, np.diag([0.2, 0.8]), atol=1e-14)

    def test_perfect_copies_orthogonal(self):
        m = marginals(build_attack(AttackParams(0.0, 1.0, 1.0)))
        assert fidelity(m.rho0_E, m.rho1_E) == pytest.approx(0.0, abs=1e-12)


class TestErrorRates:
    def test_examples(self):
        assert error_rates(build_attack(AttackParams(0.0, 1.0, 1.0))) == pytest.approx((0.0, 0.0), abs=1e-15)
        dz, dx = error_rates(build_attack(AttackParams(0.5, 0.8, 0.75)))
        assert dz == pytest.approx(0.1, abs=1e-12)
        assert dx == pytest.approx(0.125, abs=1e-12)

    @given(attack_params())
    @settings(max_examples=60, deadline=None)
    def test_formula(self, p):
        dz, dx = error_rates(build_attack(p))
        assert dz == pytest.approx((1 - p.D_Z) / 2, abs=1e-12)
        assert dx == pytest.approx((1 - p.D_X) / 2, abs=1e-12)


class TestEntropies:
    @pytest.mark.parametrize("p,w", list(itertools.product(GRID, (0.1, 0.3, 0.5))), ids=str)
    def test_mixture_identity(self, p, w):
        assert mixture_entropy(build_attack(p), w) == pytest.approx(closed_form_mixture_entropy(p, w), abs=1e-9)

    def test_perfect_fidelity(self):
        assert exact_conditional_entropy(build_attack(AttackParams(1.0, 0.4, 1.0)), 0.0) == pytest.approx(1.0, abs=1e-12)

    @given(attack_params())
    @settings(max_examples=30, deadline=None)
    def test_flat_case(self, p):
        assert exact_conditional_entropy(build_attack(p), 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_example(self):
        H = exact_conditional_entropy(build_attack(AttackParams(0.5, 0.8, 0.9)), 0.2)
        assert H == pytest.approx(cond_entropy_bound(0.5, 0.2), abs=1e-9)

    @pytest.mark.parametrize("p,eta", list(itertools.product(GRID, ETAS)), ids=str)
    def test_equality_on_grid(self, p, eta):
        H = exact_conditional_entropy(build_attack(p), eta)
        assert H == pytest.approx(cond_entropy_bound(p.F_Z, eta), abs=1e-9)


class TestTightness:
    def test_ideal_symmetric(self):
        rep = tightness_check(math.pi / 2, 0.05, 0.05, 0.0)
        assert rep.max_abs_gap <= 1e-9
        assert rep.rate_bound == pytest.approx(0.42720608576808774, abs=1e-12)

    def test_asymmetric(self):
        assert tightness_check(math.radians(70), 0.03, 0.06, 0.25).max_abs_gap <= 1e-9

    def test_noiseless(self):
        rep = tightness_check(math.pi / 2, 0.0, 0.0, 0.0)
        assert rep.rate_exact == pytest.approx(1.0, abs=1e-12)
        assert rep.rate_bound == 1.0

    def test_plateau_infeasible(self):
        with pytest.raises(InfeasibleError):
            tightness_check(math.radians(45), 0.1, 0.3, 0.0)

    @pytest.mark.parametrize("p,eta", list(itertools.product(GRID, ETAS)), ids=str)
    def test_grid(self, p, eta):
        rep = attack_tightness(p, eta)
        assert rep.max_abs_gap <= 1e-9
        assert rep.characterisation_gap <= 1e-9
        assert rep.max_abs_gap >= 0

    def test_extremes(self):
        top = attack_tightness(AttackParams(1.0, 1.0, 1.0), 0.0)
        assert top.rate_exact == pytest.approx(1.0, abs=1e-12) and top.rate_bound == pytest.approx(1.0, abs=1e-12)
        bottom = attack_tightness(AttackParams(0.0, 1.0, 1.0), 0.0)
        assert bottom.rate_exact == pytest.approx(0.0, abs=1e-12) and bottom.rate_bound == pytest.approx(0.0, abs=1e-12)

    @given(st.floats(0.05, math.pi / 2), st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 0.5))
    @settings(max_examples=60, deadline=None)
    def test_random(self, theta, dz, frac, eta):
        # keep D_X off the plateau: D_X in [|cos theta|, 1]
        c = abs(math.cos(theta))
        dx = (1 - (c + frac * (1 - c))) / 2
        assert tightness_check(theta, dz, dx, eta).max_abs_gap <= 1e-9


class TestCoinState:
    def test_half_epsilon_marginal(self):
        s = build_attack(AttackParams(0.0, 1.0, 1.0))
        c = build_coin_state(s, 0.5)
        assert np.linalg.norm(c.amplitudes) == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(np.diag(coin_marginal_a(c)).real, [0.25] * 4, atol=1e-15)

    def test_branch_probabilities(self):
        c = build_coin_state(build_attack(AttackParams(0.5, 0.8, 0.9)), 0.1)
        probs = [np.linalg.norm(c.branch(a)) ** 2 for a in range(4)]
        assert probs == pytest.approx([0.45, 0.45, 0.05, 0.05], abs=1e-14)

    @pytest.mark.parametrize("p,eps", list(itertools.product(GRID, (0.1, 0.2, 0.5))), ids=str)
    def test_round_trip(self, p, eps):
        s = build_attack(p)
        back = recover_source_states(build_coin_state(s, eps))
        for x, y in zip(s.as_tuple(), back.as_tuple()):
            assert np.max(np.abs(x.amplitudes - y.amplitudes)) <= 1e-12

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_epsilon(self, eps):
        with pytest.raises(DomainError):
            build_coin_state(build_attack(AttackParams(0.5, 0.8, 0.9)), eps)

    def test_degenerate_branch(self):
        s = build_attack(AttackParams(0.5, 0.8, 0.9))
        amps = np.concatenate([np.sqrt(0.5) * s.alpha.amplitudes, np.sqrt(0.5) * s.alpha_prime.amplitudes,
                               np.zeros(8), np.zeros(8)])
        with pytest.raises(DegenerateAmplitudeError):
            recover_source_states(CoinState(amps, 0.0))
