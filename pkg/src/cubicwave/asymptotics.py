"""Asymptotic laws of threshold and blow-up solutions, checked on sampled fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _spi
from scipy.interpolate import CubicSpline

from . import norms
from .config import DEFAULT, Config
from .duffing import PhasePoint, dense_solution
from .lifespan import t_minus, t_plus
from .penrose import (DomainError, RadialField, influence_bound, influence_slope,
                      physical_blowup_time, sample_field)
from .threshold import Behavior, beta, classify_forward

SQRT2 = math.sqrt(2.0)


class ClassificationError(ValueError):
    """The phase point is not of the class the check needs."""


class ParameterError(ValueError):
    """Inconsistent arguments (e.g. a point off the blow-up surface)."""


class RangeError(ValueError):
    """Samples do not cover the requested evaluation point."""


@dataclass(frozen=True)
class FitResult:
    """Fitted law on a window.

    ``residual`` is the largest relative deviation of the samples from the
    fitted model; ``samples`` holds the (abscissa, value) pairs behind it.
    """

    coefficient: float
    exponent_or_slope: float
    residual: float
    window: tuple[float, float]
    samples: tuple[tuple[float, float], ...] = ()

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])


@dataclass(frozen=True)
class ProfileSample:
    sigma: float
    ys: np.ndarray
    w: np.ndarray
    d: float
    t_star: float
    r_star: float

    def __post_init__(self) -> None:
        if not abs(self.d) < 1.0:
            raise ParameterError("|d| must be below 1")


def geometric_times(t0: float, t1: float, per_decade: int = 8) -> np.ndarray:
    """Geometric grid from t0 to t1 with ratio 10^(1/per_decade)."""
    n = int(round(per_decade * math.log10(t1 / t0)))
    return np.geomspace(t0, t1, max(n, 1) + 1)


def _require(p: PhasePoint, expected: Behavior, cfg: Config) -> None:
    got = classify_forward(p, cfg)
    if got is not expected:
        raise ClassificationError(f"{p} is {got.value}, expected {expected.value}")


def threshold_sign(p: PhasePoint, cfg: Config = DEFAULT) -> int:
    """+1 on Y = beta(X) (limit +sqrt2/t), -1 on Y = -beta(-X)."""
    up = abs(p.Y - beta(p.X, cfg))
    down = abs(p.Y + beta(-p.X, cfg))
    return 1 if up <= down else -1


def _linear_fit(cols: list[np.ndarray], y: np.ndarray, weight: np.ndarray) -> np.ndarray:
    A = np.stack(cols, axis=1) * weight[:, None]
    coef, *_ = np.linalg.lstsq(A, y * weight, rcond=None)
    return coef


def _max_rel(model: np.ndarray, data: np.ndarray) -> float:
    return float(np.max(np.abs(model - data) / np.abs(data)))


def _band(ts, vals) -> FitResult:
    vals = np.asarray(vals, dtype=float)
    hi, lo = float(vals.max()), float(vals.min())
    return FitResult(hi, hi / lo if lo > 0 else math.inf, 1.0 - lo / hi if hi > 0 else 0.0,
                     (float(ts[0]), float(ts[-1])), tuple(zip(map(float, ts), map(float, vals))))


def _pack(ts, vals):
    return tuple(zip(map(float, ts), map(float, vals)))


# threshold solutions

def threshold_grid(t: float, half_width: float = 30.0, outer_factor: float = 1e3) -> np.ndarray:
    """Radial grid at time t: coarse inside the cone, fine across it, geometric outside."""
    a = max(0.0, t - half_width)
    b = t + half_width
    parts = []
    if a > 0:
        parts.append(np.linspace(0.0, a, 1501)[:-1])
    parts.append(np.linspace(a, b, int(60 * (b - a)) + 1)[:-1])
    parts.append(np.geomspace(b, outer_factor * b, 1500))
    return np.concatenate(parts)


def interior_self_similar_check(p: PhasePoint, ts, rs_per_t: int = 400, cfg: Config = DEFAULT) -> FitResult:
    """sup over r <= t-1 of t(t-r)^2 |u - c/t| + t(t-r)^3 |u_t + c/t^2| per t.

    c = +-sqrt 2 according to the threshold branch. The coefficient is the
    largest value over the window (the constant of the interior estimate).
    """
    _require(p, Behavior.Threshold, cfg)
    c = threshold_sign(p, cfg) * SQRT2
    ts = np.asarray(ts, dtype=float)
    sups = []
    for t in ts:
        rs = np.linspace(0.0, t - 1.0, rs_per_t)
        f = sample_field(p, t, rs, cfg)
        gap = t - rs
        W = t * gap ** 2 * np.abs(f.u - c / t) + t * gap ** 3 * np.abs(f.ut + c / t ** 2)
        sups.append(float(np.max(W)))
    return _band(ts, sups)


def pointwise_origin_check(p: PhasePoint, ts, cfg: Config = DEFAULT) -> FitResult:
    """t^3 |u(t,0) - c/t| + t^4 |u_t(t,0) + c/t^2| along ts."""
    _require(p, Behavior.Threshold, cfg)
    c = threshold_sign(p, cfg) * SQRT2
    ts = np.asarray(ts, dtype=float)
    vals = []
    for t in ts:
        f = sample_field(p, t, np.array([0.0]), cfg)
        vals.append(t ** 3 * abs(f.u[0] - c / t) + t ** 4 * abs(f.ut[0] + c / t ** 2))
    return _band(ts, vals)


def _two_term(ts, vals, e1: float, e2: float):
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(vals, dtype=float)
    coef = _linear_fit([ts ** e1, ts ** e2], vals, 1.0 / np.abs(vals))
    model = coef[0] * ts ** e1 + coef[1] * ts ** e2
    slope = float(np.polyfit(np.log(ts), np.log(np.abs(vals)), 1)[0])
    return coef, model, slope


def threshold_lp_asymptotic(p: PhasePoint, ts, p_exp: float, cfg: Config = DEFAULT) -> FitResult:
    """Fit ||u(t)||_{L^p} = a t^(3/p-1) + b t^(2/p-1) on the window.

    The coefficient a is to be compared with (4 pi)^(1/p) sqrt2 / 3^(1/p);
    exponent_or_slope is the free log-log slope.
    """
    if not p_exp > 1.5:
        raise ValueError("p must exceed 3/2")
    _require(p, Behavior.Threshold, cfg)
    ts = np.asarray(ts, dtype=float)
    vals = [norms.lp_norm(sample_field(p, t, threshold_grid(t), cfg), p_exp).value for t in ts]
    coef, model, slope = _two_term(ts, vals, 3.0 / p_exp - 1.0, 2.0 / p_exp - 1.0)
    return FitResult(float(coef[0]), slope, _max_rel(model, np.asarray(vals)),
                     (float(ts[0]), float(ts[-1])), _pack(ts, vals))


def lp_coefficient(p_exp: float) -> float:
    return (4.0 * math.pi) ** (1.0 / p_exp) * SQRT2 / 3.0 ** (1.0 / p_exp)


def uniform_snapshot(p: PhasePoint, t: float, dr: float, length: float, cfg: Config = DEFAULT):
    """u(t, j dr) for j = 1..N with (N+1) dr >= length."""
    n = int(math.ceil(length / dr)) - 1
    rs = dr * np.arange(1, n + 1)
    f = sample_field(p, t, rs, cfg)
    if not f.in_domain.all():
        raise DomainError(f"snapshot at t={t} leaves the influence domain")
    return rs, f


def sobolev_squared(p: PhasePoint, t: float, nu: float, cfg: Config = DEFAULT,
                    dr: float = 0.05, length: float | None = None) -> float:
    """||u(t)||^2 in the homogeneous space of order nu (spectral normalisation)."""
    if length is None:
        length = 4.0 * t + 200.0
    rs, f = uniform_snapshot(p, t, dr, length, cfg)
    return norms.sobolev_norm_sampled(rs, f.u, nu, cfg).squared


def threshold_sobolev_asymptotic(p: PhasePoint, nu: float, ts, cfg: Config = DEFAULT,
                                 dr: float = 0.05) -> FitResult:
    """Growth of ||u(t)||^2 in H^nu for a threshold solution.

    nu < 1/2: coefficient of kappa t^(1-2nu) + b t^(1/2-nu);
    nu = 1/2: slope of the least-squares line against log t;
    nu > 1/2: the band max (coefficient) and max/min ratio (exponent_or_slope).
    """
    _require(p, Behavior.Threshold, cfg)
    ts = np.asarray(ts, dtype=float)
    vals = np.array([sobolev_squared(p, t, nu, cfg, dr) for t in ts])
    window = (float(ts[0]), float(ts[-1]))
    if abs(nu - 0.5) < 1e-12:
        lt = np.log(ts)
        slope, icpt = np.polyfit(lt, vals, 1)
        model = icpt + slope * lt
        return FitResult(float(slope), float(slope), _max_rel(model, vals), window, _pack(ts, vals))
    if nu < 0.5:
        coef, model, slope = _two_term(ts, vals, 1.0 - 2.0 * nu, 0.5 - nu)
        return FitResult(float(coef[0]), slope, _max_rel(model, vals), window, _pack(ts, vals))
    return _band(ts, vals)


# radiation field

def radiation_g(p: PhasePoint, eta, cfg: Config = DEFAULT, derivative: bool = False):
    """g(eta) = -(1+eta^2)^(-1/2) U(pi/2 - arctan eta), optionally with g'."""
    eta_a = np.asarray(eta, dtype=float)
    s = 0.5 * math.pi - np.arctan(eta_a)
    Tp, Tm = t_plus(p, cfg), t_minus(p, cfg)
    if np.any(s >= Tp) or np.any(s <= Tm):
        raise DomainError("pi/2 - arctan(eta) lies outside the lifespan")
    U, V = dense_solution(p, cfg).evaluate(s)
    q = 1.0 + eta_a * eta_a
    g = -U / np.sqrt(q)
    if not derivative:
        return float(g) if g.ndim == 0 else g
    gp = (eta_a * U + V) / q ** 1.5
    if g.ndim == 0:
        return float(g), float(gp)
    return g, gp


def _g_second(p: PhasePoint, eta: np.ndarray, cfg: Config) -> np.ndarray:
    s = 0.5 * math.pi - np.arctan(eta)
    U, V = dense_solution(p, cfg).evaluate(s)
    q = 1.0 + eta * eta
    inner = U - (eta * V + U ** 3 - U) / q
    return inner / q ** 1.5 - 3.0 * eta * (eta * U + V) / q ** 2.5


def linear_profile_data(p: PhasePoint, rs, cfg: Config = DEFAULT):
    """v0(r) = (g(-r) - g(r))/r and v1(r) = (g'(r) - g'(-r))/r on the grid.

    At r = 0 the limits -2 g'(0) and 2 g''(0) are used.
    """
    _require(p, Behavior.Threshold, cfg)
    rs = np.asarray(rs, dtype=float)
    if np.any(rs < 0):
        raise ValueError("radii must be nonnegative")
    v0 = np.empty_like(rs)
    v1 = np.empty_like(rs)
    small = rs < 1e-6
    big = ~small
    if big.any():
        r = rs[big]
        gm, gpm = radiation_g(p, -r, cfg, derivative=True)
        gp_, gpp = radiation_g(p, r, cfg, derivative=True)
        v0[big] = (gm - gp_) / r
        v1[big] = (gpp - gpm) / r
    if small.any():
        _, d0 = radiation_g(p, 0.0, cfg, derivative=True)
        v0[small] = -2.0 * d0
        v1[small] = 2.0 * _g_second(p, np.zeros(1), cfg)[0]
    return v0, v1


class FreeWave:
    """Radial free wave from sampled data (v0, v1) on [0, R].

    v_L(t, r) = (F(t+r) - F(t-r))/r with
    F(eta) = (eta/2) v0(|eta|) + (1/2) int_0^|eta| s v1(s) ds.
    """

    def __init__(self, rs, v0, v1):
        rs = np.asarray(rs, dtype=float)
        if rs[0] != 0.0:
            raise ValueError("samples must start at r = 0")
        self.R = float(rs[-1])
        self._v0 = CubicSpline(rs, v0)
        self._v0d = self._v0.derivative()
        self._w = CubicSpline(rs, rs * np.asarray(v1, dtype=float))
        self._W = self._w.antiderivative()
        self._v1 = CubicSpline(rs, v1)

    def _check(self, a) -> None:
        if np.max(np.abs(a)) > self.R * (1.0 + 1e-12):
            raise RangeError(f"samples cover [0, {self.R}], need {float(np.max(np.abs(a)))}")

    def F(self, eta):
        eta = np.asarray(eta, dtype=float)
        a = np.abs(eta)
        self._check(a)
        return 0.5 * eta * self._v0(a) + 0.5 * self._W(a)

    def dF(self, eta):
        eta = np.asarray(eta, dtype=float)
        a = np.abs(eta)
        self._check(a)
        return 0.5 * self._v0(a) + 0.5 * a * self._v0d(a) + 0.5 * eta * self._v1(a)

    def evaluate(self, t, r):
        """(v, v_t, v_r) at (t, r), r > 0."""
        t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
        if np.any(r <= 0):
            raise ValueError("free_wave_eval needs r > 0")
        Fp, Fm = self.F(t + r), self.F(t - r)
        dp, dm = self.dF(t + r), self.dF(t - r)
        v = (Fp - Fm) / r
        vt = (dp - dm) / r
        vr = (dp + dm) / r - v / r
        return v, vt, vr


def free_wave_eval(rs, v0, v1, t: float, r: float, cfg: Config = DEFAULT) -> float:
    v, _, _ = FreeWave(rs, v0, v1).evaluate(t, r)
    return float(v)


def profile_grid(r_max: float) -> np.ndarray:
    inner = np.linspace(0.0, 50.0, 5001)
    outer = np.geomspace(50.0, r_max, 4000)[1:]
    return np.concatenate([inner, outer])


def free_wave_for(p: PhasePoint, r_max: float, cfg: Config = DEFAULT) -> FreeWave:
    rs = profile_grid(r_max)
    v0, v1 = linear_profile_data(p, rs, cfg)
    return FreeWave(rs, v0, v1)


def _exterior_energy(p: PhasePoint, wave: FreeWave | None, t: float, A: float, cfg: Config,
                     reach: float) -> float:
    """4 pi int_{r > t+A} ((u - v)_r^2 + (u - v)_t^2) r^2 dr in eta = r - t."""
    eta = np.concatenate([np.linspace(A, A + 60.0, 6001)[:-1],
                          np.geomspace(A + 60.0 + t, reach, 3000) - t])
    rs = t + eta
    f = sample_field(p, t, rs, cfg)
    if not f.in_domain.all():
        raise DomainError("exterior region leaves the influence domain")
    dr, dt = f.ur, f.ut
    if wave is not None:
        _, vt, vr = wave.evaluate(t, rs)
        dr, dt = dr - vr, dt - vt
    dens = (dr * dr + dt * dt) * rs * rs
    core = norms.integrate_samples(eta, dens)
    fit = norms.fit_power_tail(rs[norms._last_decade(rs)], dens[norms._last_decade(rs)])
    tail = fit.c * rs[-1] ** (1.0 - fit.k) / (fit.k - 1.0) if fit.k > 1.0 else math.inf
    return 4.0 * math.pi * (core + tail)


def exterior_energy_series(p: PhasePoint, ts, A: float = 0.0, cfg: Config = DEFAULT,
                           subtract_linear: bool = True) -> np.ndarray:
    _require(p, Behavior.Threshold, cfg)
    ts = np.asarray(ts, dtype=float)
    reach = 2e3 * (ts[-1] + abs(A) + 60.0)
    wave = free_wave_for(p, 2.0 * reach, cfg) if subtract_linear else None
    return np.array([_exterior_energy(p, wave, t, A, cfg, reach) for t in ts])


def exterior_scattering_check(p: PhasePoint, ts, A: float = 0.0, cfg: Config = DEFAULT,
                              subtract_linear: bool = True) -> FitResult:
    """Exterior energy of u - v_L on r > t + A along ts.

    The coefficient is the final value relative to the first; the exponent is
    the log-log decay slope.
    """
    ts = np.asarray(ts, dtype=float)
    vals = exterior_energy_series(p, ts, A, cfg, subtract_linear)
    slope, icpt = np.polyfit(np.log(ts), np.log(vals), 1)
    model = np.exp(icpt) * ts ** slope
    return FitResult(float(vals[-1] / vals[0]), float(slope), _max_rel(model, vals),
                     (float(ts[0]), float(ts[-1])), _pack(ts, vals))


def transition_values(p: PhasePoint, ts, eta: float, cfg: Config = DEFAULT,
                      wave: FreeWave | None = None):
    """(t+eta)(u - v_L) and (t+eta) u at r = t + eta."""
    ts = np.asarray(ts, dtype=float)
    if wave is None:
        wave = free_wave_for(p, 2.0 * (ts[-1] + abs(eta)) + 10.0, cfg)
    rs = ts + eta
    u = np.array([sample_field(p, t, np.array([r]), cfg).u[0] for t, r in zip(ts, rs)])
    v, _, _ = wave.evaluate(ts, rs)
    return rs * (u - v), rs * u


def transition_check(p: PhasePoint, ts, eta: float, cfg: Config = DEFAULT) -> FitResult:
    """Fit (t+eta)(u - v_L)(t, t+eta) = L + c/t; the coefficient is L."""
    _require(p, Behavior.Threshold, cfg)
    ts = np.asarray(ts, dtype=float)
    vals, _ = transition_values(p, ts, eta, cfg)
    coef = _linear_fit([np.ones_like(ts), 1.0 / ts], vals, 1.0 / np.abs(vals))
    model = coef[0] + coef[1] / ts
    return FitResult(float(coef[0]), float(coef[1]), _max_rel(model, vals),
                     (float(ts[0]), float(ts[-1])), _pack(ts, vals))


def radiation_control(p: PhasePoint, A: float, B: float, cfg: Config = DEFAULT, n: int = 2001) -> float:
    """4 pi int_A^B g'(eta)^2 d eta."""
    eta = np.linspace(A, B, n)
    _, gp = radiation_g(p, eta, cfg, derivative=True)
    return 4.0 * math.pi * norms.integrate_samples(eta, gp * gp)


def derivative_lp_bounds(p: PhasePoint, ts, p_exp: float, cfg: Config = DEFAULT) -> FitResult:
    """Band of ||u_t(t)||_{L^p} t^(1-2/p); exponent_or_slope is the band ratio.

    The smallest cone-annulus integral over t-1 <= r <= t+1, scaled by
    t^(p-2), is appended as the last sample with abscissa -1.
    """
    if p_exp < 1:
        raise ValueError("p must be at least 1")
    _require(p, Behavior.Threshold, cfg)
    ts = np.asarray(ts, dtype=float)
    vals, annulus = [], []
    for t in ts:
        f = sample_field(p, t, threshold_grid(t), cfg)
        g = RadialField(f.t, f.rs, f.ut, f.ut, f.ut, f.in_domain)
        vals.append(norms.lp_norm(g, p_exp).value * t ** (1.0 - 2.0 / p_exp))
        ann = norms.lp_norm(g, p_exp, region=(t - 1.0, t + 1.0)).value ** p_exp
        annulus.append(ann * t ** (p_exp - 2.0))
    out = _band(ts, vals)
    return FitResult(out.coefficient, out.exponent_or_slope, out.residual, out.window,
                     out.samples + ((-1.0, float(min(annulus))),))


# blow-up solutions

def c_zero(tp: float, cfg: Config = DEFAULT) -> float:
    """2^(7/2) pi int_0^inf (1 + rho^2 t/(1+t^2))^(-3) rho^2 d rho."""
    if not tp > 0:
        raise ValueError("t_plus must be positive")
    c = tp / (1.0 + tp * tp)
    val, _ = _spi.quad(lambda r: r * r / (1.0 + c * r * r) ** 3, 0.0, math.inf,
                       epsabs=0.0, epsrel=1e-13, limit=400)
    return 2.0 ** 3.5 * math.pi * val


def c_zero_closed(tp: float) -> float:
    return 2.0 ** 3.5 * math.pi * (math.pi / 16.0) * ((1.0 + tp * tp) / tp) ** 1.5


def blowup_grid(tau: float, r_max: float = 1e4) -> np.ndarray:
    scale = math.sqrt(tau)
    return np.concatenate([[0.0], np.geomspace(1e-4 * scale, r_max, 4000)])


RATE_KINDS = ("L3", "H_half", "Ut_L32")


def blowup_norm(p: PhasePoint, tau: float, which: str, cfg: Config = DEFAULT) -> float:
    """The norm named by ``which`` at t = t_+ - tau."""
    tp = physical_blowup_time(p, cfg)
    t = tp - tau
    if which == "H_half":
        dr = math.sqrt(tau) / 20.0
        rs, f = uniform_snapshot(p, t, dr, 400.0, cfg)
        return norms.sobolev_norm_sampled(rs, f.u, 0.5, cfg).value
    f = sample_field(p, t, blowup_grid(tau), cfg)
    if which == "L3":
        return norms.lp_norm(f, 3.0).value
    if which == "Ut_L32":
        g = RadialField(f.t, f.rs, f.ut, f.ut, f.ut, f.in_domain)
        return norms.lp_norm(g, 1.5).value
    raise ValueError(f"unknown norm {which!r}; choose from {RATE_KINDS}")


def blowup_rate_check(p: PhasePoint, taus, which: str, cfg: Config = DEFAULT) -> FitResult:
    """Rate of the named norm as t -> t_+.

    L3: n tau^(1/2) = a + b tau^(1/2) + c tau, coefficient a (to compare with
    C0^(1/3)). Ut_L32: n tau = a + b tau + c tau^2, coefficient a (to compare
    with 2^(-1/2) C0^(2/3)). H_half: band of n tau^(1/2).
    """
    _require(p, Behavior.Blowup, cfg)
    taus = np.asarray(taus, dtype=float)
    n = np.array([blowup_norm(p, tau, which, cfg) for tau in taus])
    window = (float(taus.min()), float(taus.max()))
    if which == "H_half":
        return _band(taus, n * np.sqrt(taus))
    if which == "L3":
        vals = n * np.sqrt(taus)
        cols = [np.ones_like(taus), np.sqrt(taus), taus]
    else:
        vals = n * taus
        cols = [np.ones_like(taus), taus, taus ** 2]
    coef = _linear_fit(cols, vals, 1.0 / np.abs(vals))
    model = sum(c * col for c, col in zip(coef, cols))
    return FitResult(float(coef[0]), float(coef[1]), _max_rel(model, vals), window, _pack(taus, vals))


def blowup_targets(p: PhasePoint, cfg: Config = DEFAULT) -> dict[str, float]:
    c0 = c_zero(physical_blowup_time(p, cfg), cfg)
    return {"C0": c0, "L3": c0 ** (1.0 / 3.0), "Ut_L32": 2.0 ** -0.5 * c0 ** (2.0 / 3.0)}


def surface_time(p: PhasePoint, r_star: float, cfg: Config = DEFAULT) -> float:
    """t_* = M_+(T_+, r_*) on the blow-up surface."""
    return float(influence_bound(t_plus(p, cfg), r_star, 1))


def profile_slope(t_star: float, r_star: float) -> float:
    return 2.0 * t_star * r_star / (1.0 + t_star * t_star + r_star * r_star)


def profile_limit(ys, d: float) -> np.ndarray:
    ys = np.asarray(ys, dtype=float)
    return SQRT2 * math.sqrt(1.0 - d * d) / (1.0 + ys * d)


def blowup_profile(p: PhasePoint, t_star: float, r_star: float, sigmas, ys,
                   cfg: Config = DEFAULT, surface_tol: float = 1e-8) -> list[ProfileSample]:
    """w(sigma, y) = (t_* - t) u(t, r_* + y (t_* - t)) with t = t_* - exp(-sigma)."""
    _require(p, Behavior.Blowup, cfg)
    Tp = t_plus(p, cfg)
    on = float(influence_bound(Tp, r_star, 1))
    if abs(on - t_star) > surface_tol * max(1.0, abs(on)):
        raise ParameterError(f"(t*, r*) = ({t_star}, {r_star}) is off the blow-up surface (M+ = {on})")
    d = profile_slope(t_star, r_star)
    slope = float(influence_slope(Tp, r_star))
    if abs(slope - d) > 1e-8:
        raise ParameterError(f"surface slope {slope} disagrees with d = {d}")
    ys = np.asarray(ys, dtype=float)
    out = []
    for sg in sigmas:
        tau = math.exp(-sg)
        t = t_star - tau
        rs = np.abs(r_star + ys * tau)
        order = np.argsort(rs)
        f = sample_field(p, t, rs[order], cfg)
        if not f.in_domain.all():
            raise DomainError(f"backward cone at sigma={sg} leaves the influence domain")
        w = np.empty_like(rs)
        w[order] = tau * f.u
        out.append(ProfileSample(float(sg), ys, w, d, t_star, r_star))
    return out


def profile_deviation_fit(samples: list[ProfileSample]) -> FitResult:
    """Fit sup_y |w - limit| = K exp(-k sigma); coefficient K, exponent k.

    The residual is the worst factor (as a relative deviation) by which a
    consecutive-sample decay ratio differs from exp(k dsigma).
    """
    sig = np.array([s.sigma for s in samples])
    dev = np.array([float(np.max(np.abs(s.w - profile_limit(s.ys, s.d)))) for s in samples])
    slope, icpt = np.polyfit(sig, np.log(dev), 1)
    k = -slope
    model = np.exp(icpt - k * sig)
    return FitResult(float(math.exp(icpt)), float(k), _max_rel(model, dev),
                     (float(sig[0]), float(sig[-1])), _pack(sig, dev))


def profile_ratio_test(fit: FitResult) -> float:
    """Largest factor between observed and e^(dsigma) decay ratios of consecutive samples."""
    sig = np.array([s for s, _ in fit.samples])
    dev = np.array([v for _, v in fit.samples])
    ratios = dev[:-1] / dev[1:]
    expected = np.exp(np.diff(sig))
    q = ratios / expected
    return float(np.max(np.maximum(q, 1.0 / q)))


def attractor_coefficients(p: PhasePoint, cfg: Config = DEFAULT) -> tuple[float, float]:
    Tp = t_plus(p, cfg)
    return math.sin(Tp), math.cos(Tp)


def attractor(p: PhasePoint, t, r, cfg: Config = DEFAULT):
    a, b = attractor_coefficients(p, cfg)
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    return 2.0 * SQRT2 / (a * (1.0 + r * r - t * t) - 2.0 * b * t)


def attractor_deviation(p: PhasePoint, taus, rs=None, cfg: Config = DEFAULT) -> FitResult:
    """sup over in-domain r of |u - attractor| / tau along t = t_+ - tau.

    The default radial grid is [0, 10]. The coefficient is the largest ratio;
    exponent_or_slope is the log-log slope of the raw deviation against tau.
    """
    _require(p, Behavior.Blowup, cfg)
    tp = physical_blowup_time(p, cfg)
    rs = np.linspace(0.0, 10.0, 2001) if rs is None else np.asarray(rs, dtype=float)
    taus = np.asarray(taus, dtype=float)
    devs = []
    for tau in taus:
        t = tp - tau
        f = sample_field(p, t, rs, cfg)
        m = f.in_domain
        devs.append(float(np.max(np.abs(f.u[m] - attractor(p, t, rs[m], cfg)))))
    devs = np.array(devs)
    ratio = devs / taus
    slope = math.nan
    if len(taus) > 1:
        slope = float(np.polyfit(np.log(taus), np.log(np.maximum(devs, 1e-300)), 1)[0])
    return FitResult(float(ratio.max()), slope, 1.0 - float(ratio.min() / ratio.max()) if ratio.max() > 0 else 0.0,
                     (float(taus.min()), float(taus.max())), _pack(taus, ratio))
