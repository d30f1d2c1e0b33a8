import math

import numpy as np
import pytest

from cubicwave.config import DEFAULT
from cubicwave.duffing import PhasePoint, energy, integrate
from cubicwave.lifespan import (boundary_tplus, e_infinity, lifespan, quad_R, quad_S,
                                t_minus, t_plus, total_lifespan_by_energy, x_critical)

SQRT2 = math.sqrt(2.0)
PI = math.pi

# frozen after agreement of the Gauss-Kronrod and tanh-sinh routes to 1e-12
E_INF = 2.6853543447618726
X_C = 1.046200688768708


class TestQuadR:
    def test_boundary_zero_energy(self):
        assert quad_R(PhasePoint(SQRT2, 0)) == pytest.approx(PI / 2, abs=1e-10)

    def test_zero_energy_branch(self):
        assert quad_R(PhasePoint(2, 2)) == pytest.approx(PI / 4, abs=1e-10)

    def test_quarter_energy_limit(self):
        # just off E = 1/4 the integral approaches sqrt2 atanh(1/2)
        p = PhasePoint(2, 3 / SQRT2 + 1e-9)
        assert quad_R(p) == pytest.approx(SQRT2 * math.atanh(0.5), abs=1e-6)

    def test_decreasing_in_X_and_E(self):
        # fixed E below 1/4: Y = sqrt(2E - X^2 + X^4/2)
        E = 0.1
        xs = np.linspace(1.5, 3.0, 8)
        vals = [quad_R(PhasePoint(x, math.sqrt(2 * E - x * x + x ** 4 / 2))) for x in xs]
        assert np.all(np.diff(vals) < 0)
        es = np.linspace(0.3, 3.0, 8)
        vals = [quad_R(PhasePoint(1.2, math.sqrt(2 * e - 1.44 + 1.2 ** 4 / 2))) for e in es]
        assert np.all(np.diff(vals) < 0)


class TestQuadS:
    def test_zero_energy_limit(self):
        # |X| = sqrt2, E -> 0+: the inner branch vanishes and S -> pi/2,
        # while S + R of the reflected point gives the total lifespan pi
        p = PhasePoint(SQRT2, -1e-7)
        assert quad_S(p) == pytest.approx(PI / 2, abs=1e-6)
        assert quad_S(p) + quad_R(p.reflected()) == pytest.approx(PI, abs=1e-6)

    def test_matches_ode(self):
        p = PhasePoint(-2, 1)
        S = quad_S(p)
        tr = integrate(p, 5.0)
        assert tr.truncated_at_blowup
        assert S == pytest.approx(tr.blowup_time, abs=1e-8)

    def test_even_in_X(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            X = rng.uniform(1.1, 3.0)
            Y = rng.uniform(-1.0, 0.0)
            if energy(PhasePoint(X, Y)) >= 0.25:
                continue
            assert quad_S(PhasePoint(-X, -Y)) == pytest.approx(quad_S(PhasePoint(X, Y)), rel=1e-12)

    def test_outside_domain(self):
        assert quad_S(PhasePoint(0.5, -0.1)) == math.inf
        assert quad_S(PhasePoint(2.0, -3.0)) == math.inf

    def test_increasing_in_X(self):
        E = -0.5
        xs = np.linspace(1.8, 3.0, 8)
        vals = [quad_S(PhasePoint(x, -math.sqrt(2 * E - x * x + x ** 4 / 2))) for x in xs]
        assert np.all(np.diff(vals) > 0)


class TestTPlus:
    def test_bounded_well(self):
        assert t_plus(PhasePoint(0.5, 0)) == math.inf

    def test_zero_energy(self):
        assert t_plus(PhasePoint(2, 2)) == pytest.approx(PI / 4, abs=1e-10)

    def test_constant_solution(self):
        assert t_plus(PhasePoint(1, 0)) == math.inf

    def test_quarter_closed_form(self):
        assert t_plus(PhasePoint(2, 3 / SQRT2)) == pytest.approx(SQRT2 * math.atanh(0.5), abs=1e-12)

    def test_literal_point_against_ode(self):
        p = PhasePoint(2, 1.5)
        tr = integrate(p, 3.0)
        assert t_plus(p) == pytest.approx(tr.blowup_time, abs=1e-8)

    def test_agrees_with_ode(self):
        rng = np.random.default_rng(11)
        done = 0
        while done < 50:
            p = PhasePoint(*rng.uniform(-3, 3, 2))
            if abs(energy(p) - 0.25) < 1e-3:
                continue
            T = t_plus(p)
            if not math.isfinite(T):
                continue
            tr = integrate(p, T + 1.0)
            assert tr.truncated_at_blowup
            assert abs(T - tr.blowup_time) <= 1e-6
            done += 1


class TestTMinus:
    def test_bounded_well(self):
        assert t_minus(PhasePoint(0.5, 0)) == -math.inf

    def test_mirror(self):
        assert t_minus(PhasePoint(2, -2)) == pytest.approx(-PI / 4, abs=1e-10)

    def test_quarter_energy_global_backward(self):
        assert t_minus(PhasePoint(2, 3 / SQRT2)) == -math.inf

    def test_lifespan_flags(self):
        ls = lifespan(PhasePoint(2, 2))
        assert ls.finite_plus and ls.finite_minus
        assert ls.t_minus < 0 < ls.t_plus
        ls = lifespan(PhasePoint(0.1, 0.1))
        assert not ls.finite_plus and not ls.finite_minus


class TestTotalLifespan:
    def test_zero_energy(self):
        assert total_lifespan_by_energy(0.0) == pytest.approx(PI, abs=1e-10)

    def test_quarter(self):
        assert total_lifespan_by_energy(0.25) == math.inf

    def test_e_infinity(self):
        assert total_lifespan_by_energy(e_infinity()) == pytest.approx(PI, abs=1e-10)

    def test_consistency(self):
        rng = np.random.default_rng(5)
        done = 0
        while done < 20:
            p = PhasePoint(*rng.uniform(-3, 3, 2))
            E = energy(p)
            tp, tm = t_plus(p), t_minus(p)
            if abs(E - 0.25) < 1e-3 or not (math.isfinite(tp) and math.isfinite(tm)):
                continue
            assert tp + abs(tm) == pytest.approx(total_lifespan_by_energy(E), abs=1e-7)
            done += 1

    def test_monotone_branches(self):
        below = [total_lifespan_by_energy(e) for e in np.linspace(0.01, 0.24, 10)]
        above = [total_lifespan_by_energy(e) for e in np.linspace(0.26, 5.0, 10)]
        assert np.all(np.diff(below) > 0)
        assert np.all(np.diff(above) < 0)


class TestConstants:
    def test_e_infinity_value(self):
        assert e_infinity() == pytest.approx(E_INF, rel=1e-10)
        assert E_INF > 0.25

    def test_e_infinity_two_rules(self):
        assert e_infinity(rule="tanh-sinh") == pytest.approx(e_infinity(), rel=1e-8)

    def test_x_critical_value(self):
        xc = x_critical()
        assert xc == pytest.approx(X_C, rel=1e-10)
        assert 1 < xc < SQRT2
        assert boundary_tplus(xc) == pytest.approx(PI, abs=1e-10)

    def test_x_critical_tolerance_refinement(self):
        tight = DEFAULT.scaled(0.01)
        assert x_critical(tight) == pytest.approx(x_critical(), abs=1e-10)

    def test_x_critical_two_rules(self):
        assert x_critical(rule="tanh-sinh") == pytest.approx(X_C, rel=1e-9)


class TestBoundary:
    def test_sqrt2(self):
        assert boundary_tplus(SQRT2) == pytest.approx(PI / 2, abs=1e-12)

    def test_diverges_at_one(self):
        assert boundary_tplus(1.0) == math.inf
        assert boundary_tplus(1.0 + 1e-8) > 10

    def test_matches_quad_r(self):
        assert boundary_tplus(1.2) == pytest.approx(quad_R(PhasePoint(1.2, 0.0)), abs=1e-8)

    def test_even_and_decreasing(self):
        xs = np.linspace(1.01, SQRT2, 12)
        vals = np.array([boundary_tplus(x) for x in xs])
        assert np.all(np.diff(vals) < 0)
        assert np.allclose(vals, [boundary_tplus(-x) for x in xs], rtol=1e-14)
