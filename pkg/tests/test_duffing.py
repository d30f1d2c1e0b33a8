import math

import numpy as np
import pytest
from scipy import integrate as spi

from cubicwave import kernels
from cubicwave.duffing import (Kind, ParameterError, PhasePoint, LifespanError, blowup_asymptote,
                               elliptic_k, energy, energy_of, explicit_blowup_time,
                               explicit_initial_point, explicit_solution, integrate, jacobi_sn,
                               state_at)

SQRT2 = math.sqrt(2.0)


class TestEnergy:
    def test_origin(self):
        assert energy(PhasePoint(0, 0)) == 0.0

    def test_constant_solution(self):
        assert energy(PhasePoint(1, 0)) == pytest.approx(0.25, abs=1e-15)

    def test_zero_energy_family(self):
        assert energy(PhasePoint(SQRT2, 0)) == pytest.approx(0.0, abs=1e-15)

    def test_lower_bound(self):
        rng = np.random.default_rng(1)
        for X, Y in rng.uniform(-3, 3, size=(50, 2)):
            assert energy(PhasePoint(X, Y)) >= X * X / 2 - X ** 4 / 4

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            PhasePoint(math.nan, 0.0)


class TestIntegrate:
    def test_fixed_point(self):
        tr = integrate(PhasePoint(0, 0), 1.0)
        assert np.all(tr.U == 0) and np.all(tr.Udot == 0)
        assert not tr.truncated_at_blowup

    def test_constant_one(self):
        tr = integrate(PhasePoint(1, 0), 5.0)
        assert np.max(np.abs(tr.U - 1.0)) < 1e-12
        assert tr.s_last == pytest.approx(5.0)

    def test_quarter_energy_tanh(self):
        p = PhasePoint(0.5, 0.75 / SQRT2)
        tr = integrate(p, 3.0)
        s = np.linspace(0, 3, 301)
        U, _ = tr.evaluate(s)
        ref = explicit_solution(Kind.EQuarter, {"X": 0.5}, s)
        assert np.max(np.abs(U - ref)) < 1e-8

    def test_energy_drift(self, cfg):
        for X, Y in [(0.3, 0.2), (0.9, -0.4), (1.2, 0.0), (2.0, 2.0), (-1.5, 0.7)]:
            tr = integrate(PhasePoint(X, Y), 3.0)
            assert tr.energy_drift <= cfg.energy_tol

    def test_states_monotone(self):
        tr = integrate(PhasePoint(0.7, 0.1), -2.0)
        assert np.all(np.diff(tr.s) < 0)
        assert len(tr.states) == len(tr.s)

    def test_blowup_truncation(self, cfg):
        tr = integrate(PhasePoint(2, 2), 2.0)
        assert tr.truncated_at_blowup
        assert tr.blowup_side == 1
        assert abs(tr.U[-1]) >= cfg.blowup_cutoff
        assert tr.blowup_time == pytest.approx(math.pi / 4, abs=1e-9)

    def test_backward_blowup_side(self):
        tr = integrate(PhasePoint(-2, 2), -2.0)
        assert tr.truncated_at_blowup and tr.blowup_side == -1
        assert tr.blowup_time == pytest.approx(-math.pi / 4, abs=1e-9)

    def test_infinite_end_rejected(self):
        with pytest.raises(ParameterError):
            integrate(PhasePoint(0, 0), math.inf)


class TestStateAt:
    def test_initial_condition(self):
        st = state_at(PhasePoint(2, 2), 0.0)
        assert (st.U, st.Udot) == pytest.approx((2.0, 2.0), abs=1e-14)

    def test_zero_energy_closed_form(self):
        st = state_at(PhasePoint(2, 2), 0.3)
        assert st.U == pytest.approx(SQRT2 / math.sin(math.pi / 4 - 0.3), rel=1e-9)

    def test_quarter_energy_closed_form(self):
        st = state_at(PhasePoint(0.5, 0.75 / SQRT2), 1.0)
        assert st.U == pytest.approx(math.tanh(1 / SQRT2 + math.atanh(0.5)), abs=1e-10)

    def test_point_off_quarter_level(self):
        # (0.5, 0.375) has energy below 1/4, so it oscillates in the well
        p = PhasePoint(0.5, 0.375)
        assert energy(p) < 0.25
        st = state_at(p, 1.0)
        assert abs(st.U) < 1.0
        assert energy_of(st.U, st.Udot) == pytest.approx(energy(p), abs=1e-10)

    def test_outside_lifespan(self):
        with pytest.raises(LifespanError) as info:
            state_at(PhasePoint(2, 2), 1.0)
        assert info.value.t_plus == pytest.approx(math.pi / 4, abs=1e-9)

    def test_time_reversal(self):
        a = state_at(PhasePoint(0.8, 0.3), 1.7)
        b = state_at(PhasePoint(0.8, -0.3), -1.7)
        assert b.U == pytest.approx(a.U, abs=1e-9)
        assert b.Udot == pytest.approx(-a.Udot, abs=1e-9)

    def test_sign_symmetry(self):
        a = state_at(PhasePoint(1.1, -0.2), 0.9)
        b = state_at(PhasePoint(-1.1, 0.2), 0.9)
        assert (b.U, b.Udot) == pytest.approx((-a.U, -a.Udot), abs=1e-9)


class TestExplicit:
    def test_quarter_at_origin(self):
        s = np.linspace(-3, 3, 13)
        assert np.allclose(explicit_solution("EQuarter", {"X": 0.0}, s), np.tanh(s / SQRT2))

    def test_zero_energy_initial(self):
        assert explicit_solution(Kind.EZero, {"X": 2.0}, 0.0) == pytest.approx(2.0)

    def test_zero_energy_blowup_time(self):
        assert explicit_blowup_time(Kind.EZero, {"X": 2.0}) == pytest.approx(math.pi / 4)

    def test_elliptic_small_amplitude(self):
        s = np.linspace(0, 6, 61)
        for A in (1e-2, 5e-3):
            U = explicit_solution(Kind.EllipticSn, {"A": A, "theta": 0.3}, s)
            w = math.sqrt(1 - A * A / 2)
            assert np.max(np.abs(U - A * np.sin(w * s + 0.3))) < 10 * A ** 3

    def test_parameter_ranges(self):
        with pytest.raises(ParameterError):
            explicit_solution(Kind.EZero, {"X": 1.0}, 0.0)
        with pytest.raises(ParameterError):
            explicit_solution(Kind.EllipticSn, {"A": 1.5}, 0.0)
        with pytest.raises(ParameterError):
            explicit_solution(Kind.EQuarter, {"X": 1.0}, 0.0)
        with pytest.raises(ParameterError):
            explicit_solution(Kind.Constant, {"X": 0.5}, 0.0)

    @pytest.mark.parametrize("kind,key,lo,hi", [
        (Kind.EQuarter, "X", -0.95, 0.95),
        (Kind.EQuarter, "X", 1.05, 3.0),
        (Kind.EZero, "X", 1.5, 3.0),
        (Kind.EllipticSn, "A", 0.1, 1.3),
    ])
    def test_numeric_matches_closed_form(self, kind, key, lo, hi):
        rng = np.random.default_rng(7)
        for _ in range(20):
            params = {key: float(rng.uniform(lo, hi)), "sign": float(rng.choice([-1, 1]))}
            if kind is Kind.EllipticSn:
                params = {"A": params["A"], "theta": float(rng.uniform(0, 3))}
            p = explicit_initial_point(kind, params)
            T = explicit_blowup_time(kind, params)
            end = 0.9 * T if math.isfinite(T) else 3.0
            s = np.linspace(0, end, 50)
            tr = integrate(p, end)
            U, _ = tr.evaluate(s)
            ref = explicit_solution(kind, params, s)
            assert np.max(np.abs(U - ref) / np.maximum(1, np.abs(ref))) < 1e-8


class TestJacobiSn:
    def test_zero_modulus(self):
        u = np.linspace(-5, 5, 21)
        assert np.allclose(jacobi_sn(u, 0.0), np.sin(u), atol=0)

    def test_odd(self):
        assert jacobi_sn(0.0, 0.7) == 0.0

    def test_quadrature_inversion(self):
        m, u = 0.5, 0.8
        phi = spi_solve(lambda ph: spi.quad(lambda th: 1 / math.sqrt(1 - m * math.sin(th) ** 2),
                                            0, ph, epsabs=1e-15, epsrel=1e-13)[0] - u, 0.0, 2.0)
        assert float(jacobi_sn(u, m)) == pytest.approx(math.sin(phi), abs=1e-12)

    def test_matches_scipy(self):
        from scipy.special import ellipj
        u = np.linspace(-4, 4, 41)
        for m in (0.1, 0.5, 0.9, 0.999):
            assert np.allclose(jacobi_sn(u, m), ellipj(u, m)[0], atol=1e-12)

    def test_periodicity(self):
        u = np.linspace(0, 3, 17)
        for m in (0.2, 0.6, 0.95):
            K = elliptic_k(m)
            assert np.max(np.abs(jacobi_sn(u + 4 * K, m) - jacobi_sn(u, m))) < 1e-10

    def test_modulus_range(self):
        with pytest.raises(ParameterError):
            jacobi_sn(0.5, 1.0)


def spi_solve(f, a, b):
    from scipy.optimize import brentq
    return brentq(f, a, b, xtol=1e-15)


class TestAsymptote:
    def test_direct(self):
        U, V = blowup_asymptote(math.pi / 2, math.pi / 2 - 1)
        assert (U, V) == pytest.approx((SQRT2, SQRT2))

    def test_mirror(self):
        a = blowup_asymptote(1.0, 0.3, 1)
        b = blowup_asymptote(1.0, 0.3, -1)
        assert b == pytest.approx((-a[0], -a[1]))

    def test_zero_energy_deviation_linear(self):
        T = math.pi / 4
        x = np.linspace(0.01, 0.5, 50)
        U, _ = integrate(PhasePoint(2, 2), 1.0).evaluate(T - x)
        approx, _ = blowup_asymptote(T, T - x)
        assert np.max(np.abs(U - approx) / x) < 0.5

    def test_past_singularity(self):
        with pytest.raises(ParameterError):
            blowup_asymptote(1.0, 1.0)


def test_energy_of_vectorised():
    assert np.allclose(energy_of(np.array([1.0, 0.0]), np.array([0.0, 1.0])), [0.25, 0.5])


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")
