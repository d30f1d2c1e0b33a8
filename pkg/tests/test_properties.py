import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cubicwave.duffing import PhasePoint, energy, energy_of, integrate, state_at
from cubicwave.lifespan import t_minus, t_plus
from cubicwave.norms import data_norm_identity, lp_norm
from cubicwave.penrose import RadialField, sample_field
from cubicwave.threshold import Behavior, beta, classify_bidirectional

coord = st.floats(-3, 3, allow_nan=False)
small = st.floats(-0.9, 0.9, allow_nan=False)
times = st.floats(-2.5, 2.5, allow_nan=False)
SETTINGS = settings(max_examples=40, deadline=None)


@SETTINGS
@given(coord, coord)
def test_energy_conserved(X, Y):
    p = PhasePoint(X, Y)
    T = min(t_plus(p), 3.0)
    tr = integrate(p, 0.95 * T if T < 3.0 else 3.0)
    scale = np.maximum(1.0, 0.5 * tr.Udot ** 2 + 0.5 * tr.U ** 2 + 0.25 * tr.U ** 4)
    assert np.max(np.abs(energy_of(tr.U, tr.Udot) - energy(p)) / scale) <= 1e-8


@SETTINGS
@given(coord, coord, times)
def test_time_reversal(X, Y, s):
    p = PhasePoint(X, Y)
    assume(t_minus(p) + 0.1 < s < t_plus(p) - 0.1)
    a = state_at(p, s)
    b = state_at(p.reflected(), -s)
    scale = max(1.0, abs(a.U), abs(a.Udot))
    assert abs(b.U - a.U) <= 1e-8 * scale
    assert abs(b.Udot + a.Udot) <= 1e-8 * scale


@SETTINGS
@given(coord, coord, times)
def test_sign_symmetry(X, Y, s):
    p = PhasePoint(X, Y)
    assume(t_minus(p) + 0.1 < s < t_plus(p) - 0.1)
    a = state_at(p, s)
    b = state_at(p.negated(), s)
    scale = max(1.0, abs(a.U), abs(a.Udot))
    assert abs(b.U + a.U) <= 1e-8 * scale
    assert abs(b.Udot + a.Udot) <= 1e-8 * scale


@SETTINGS
@given(coord, coord)
def test_lifespan_mirror(X, Y):
    p = PhasePoint(X, Y)
    assert t_minus(p) == -t_plus(p.reflected())
    assert t_plus(p.negated()) == pytest.approx(t_plus(p), rel=1e-12)


@SETTINGS
@given(coord, coord)
def test_classification_symmetries(X, Y):
    c = classify_bidirectional(PhasePoint(X, Y))
    r = classify_bidirectional(PhasePoint(X, -Y))
    n = classify_bidirectional(PhasePoint(-X, -Y))
    assert (r.forward, r.backward) == (c.backward, c.forward)
    assert n == c


@SETTINGS
@given(coord, st.floats(1e-3, 1.0))
def test_beta_decreasing(X, h):
    assert beta(X + h) < beta(X)


@SETTINGS
@given(st.floats(0.0, 3.0))
def test_beta_asymmetry(X):
    assume(X > 1e-3)
    assert beta(X) > -beta(-X)


@SETTINGS
@given(coord)
def test_threshold_forward_behaviour(X):
    p = PhasePoint(X, beta(X))
    assert classify_bidirectional(p).forward is Behavior.Threshold


@SETTINGS
@given(coord, coord, st.floats(0, 5), st.floats(0, 5), st.floats(0, 5), st.floats(1.0, 4.0))
def test_region_monotone(X, Y, a, b, c, q):
    lo, mid, hi = sorted((a, b, c))
    assume(hi - lo > 0.1)
    rs = np.linspace(0, 5, 501)
    u = 2 * X / (1 + rs ** 2) + Y * np.exp(-rs)
    f = RadialField(0.0, rs, u, u, u, np.ones(rs.shape, bool))
    inner = lp_norm(f, q, (mid, hi)).value if hi - mid > 0.02 else 0.0
    assert inner <= lp_norm(f, q, (lo, hi)).value * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(coord, coord)
def test_data_identity(X, Y):
    assume(abs(X) + abs(Y) > 1e-3)
    assert data_norm_identity(X, Y) == pytest.approx(2 * math.pi ** 2 * (X * X + Y * Y), rel=1e-6)


@SETTINGS
@given(coord, coord)
def test_initial_snapshot(X, Y):
    rs = np.linspace(0, 10, 21)
    f = sample_field(PhasePoint(X, Y), 0.0, rs)
    assert np.allclose(f.u, 2 * X / (1 + rs ** 2), atol=1e-12)
    assert np.allclose(f.ut, 4 * Y / (1 + rs ** 2) ** 2, atol=1e-12)


@SETTINGS
@given(small, small, st.floats(0, 50), st.floats(0, 50))
def test_scattering_domain(X, Y, t, r):
    p = PhasePoint(X * 0.3, Y * 0.3)
    assert sample_field(p, t, np.array([r])).in_domain.all()
