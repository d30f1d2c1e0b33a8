"""Physical field u(t, r) = Omega(t, r) U(s(t, r)) and its influence domain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Config
from .duffing import LifespanError, PhasePoint, dense_solution
from .lifespan import t_minus, t_plus


class DomainError(ValueError):
    """Point outside the maximal influence domain."""

    def __init__(self, message: str, m_minus=None, m_plus=None):
        super().__init__(message)
        self.m_minus = m_minus
        self.m_plus = m_plus


@dataclass(frozen=True)
class ConformalFactors:
    omega: np.ndarray
    s: np.ndarray
    ds_dt: np.ndarray
    ds_dr: np.ndarray
    domega_dt: np.ndarray
    domega_dr: np.ndarray


def conformal_factors(t, r) -> ConformalFactors:
    """Omega, s and their first derivatives.

    s is taken from atan2(2t, 1 + r^2 - t^2), which equals
    arctan(t + r) + arctan(t - r) and keeps the O(1/t) distance to +-pi.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    p = 1.0 + (t + r) ** 2
    q = 1.0 + (t - r) ** 2
    omega = 2.0 / np.sqrt(p * q)
    s = np.arctan2(2.0 * t, 1.0 + r * r - t * t)
    ds_dt = 1.0 / p + 1.0 / q
    ds_dr = 1.0 / p - 1.0 / q
    domega_dt = -0.5 * t * omega ** 3 * (1.0 + t * t - r * r)
    domega_dr = -0.5 * r * omega ** 3 * (1.0 + r * r - t * t)
    return ConformalFactors(omega, s, ds_dt, ds_dr, domega_dt, domega_dr)


def _cot(T: float) -> float:
    if abs(abs(T) - 0.5 * math.pi) < 1e-15:
        return 0.0
    return math.cos(T) / math.sin(T)


def influence_bound(T: float, r, side: int):
    """M+(T, r) (side=+1) or M-(T, r) (side=-1); infinite when |T| >= pi."""
    r = np.asarray(r, dtype=float)
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if abs(T) >= math.pi:
        return np.full(r.shape, side * math.inf) if r.ndim else side * math.inf
    c = _cot(T)
    root = np.sqrt(1.0 + r * r + c * c)
    if side == 1:
        # -c + root without cancellation when c > 0
        out = (1.0 + r * r) / (c + root) if c > 0 else -c + root
    else:
        out = -(1.0 + r * r) / (root - c) if c < 0 else -c - root
    return out if r.ndim else float(out)


def influence_slope(T: float, r):
    """d M+(T, r) / d r."""
    r = np.asarray(r, dtype=float)
    c = _cot(T)
    return r / np.sqrt(1.0 + r * r + c * c)


def physical_blowup_time(p: PhasePoint, cfg: Config = DEFAULT) -> float:
    """Physical forward blow-up time tan(T+/2); infinite when T+ >= pi."""
    T = t_plus(p, cfg)
    if T >= math.pi:
        return math.inf
    return math.tan(0.5 * T)


@dataclass
class RadialField:
    """Radial snapshot at fixed t; values outside the domain are NaN."""

    t: float
    rs: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    ur: np.ndarray
    in_domain: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.rs) < 0):
            raise ValueError("radial grid must be sorted")


def _lifespan_pair(p: PhasePoint, cfg: Config) -> tuple[float, float]:
    return t_minus(p, cfg), t_plus(p, cfg)


def domain_mask(p: PhasePoint, t, r, cfg: Config = DEFAULT):
    """True where M-(T-, r) < t < M+(T+, r), with a guard band in s."""
    Tm, Tp = _lifespan_pair(p, cfg)
    s = conformal_factors(t, r).s
    g = cfg.domain_guard
    return (s > Tm + g) & (s < Tp - g)


def _evaluate(p: PhasePoint, t, r, cfg: Config, strict: bool):
    t_arr, r_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.abs(np.asarray(r, dtype=float)))
    cf = conformal_factors(t_arr, r_arr)
    mask = domain_mask(p, t_arr, r_arr, cfg)
    sol = dense_solution(p, cfg)
    mask &= sol.covers(cf.s)
    if strict and not np.all(mask):
        Tm, Tp = _lifespan_pair(p, cfg)
        bad = ~mask
        tb, rb = t_arr[bad].ravel()[0], r_arr[bad].ravel()[0]
        raise DomainError(
            f"(t, r) = ({tb}, {rb}) lies outside the influence domain "
            f"M-={influence_bound(Tm, rb, -1)}, M+={influence_bound(Tp, rb, 1)}",
            influence_bound(Tm, rb, -1), influence_bound(Tp, rb, 1))
    U = np.full(t_arr.shape, np.nan)
    V = np.full(t_arr.shape, np.nan)
    if mask.any():
        try:
            U[mask], V[mask] = sol.evaluate(cf.s[mask])
        except LifespanError as exc:  # pragma: no cover - mask already guards this
            raise DomainError(str(exc)) from exc
    u = cf.omega * U
    ut = cf.domega_dt * U + cf.omega * cf.ds_dt * V
    ur = cf.domega_dr * U + cf.omega * cf.ds_dr * V
    return u, ut, ur, mask


def field_value(p: PhasePoint, t, r, cfg: Config = DEFAULT):
    """u(t, r) = Omega U(s); raises DomainError outside the influence domain."""
    u, _, _, _ = _evaluate(p, t, r, cfg, strict=True)
    return float(u) if np.ndim(u) == 0 else u


def field_time_derivative(p: PhasePoint, t, r, cfg: Config = DEFAULT):
    """du/dt = dOmega/dt U(s) + Omega ds/dt U'(s)."""
    _, ut, _, _ = _evaluate(p, t, r, cfg, strict=True)
    return float(ut) if np.ndim(ut) == 0 else ut


def field_radial_derivative(p: PhasePoint, t, r, cfg: Config = DEFAULT):
    """du/dr by the same chain rule."""
    _, _, ur, _ = _evaluate(p, t, r, cfg, strict=True)
    return float(ur) if np.ndim(ur) == 0 else ur


def sample_field(p: PhasePoint, t: float, rs, cfg: Config = DEFAULT) -> RadialField:
    """Vectorised field, time and radial derivative with a domain mask."""
    rs = np.asarray(rs, dtype=float)
    u, ut, ur, mask = _evaluate(p, float(t), rs, cfg, strict=False)
    return RadialField(float(t), rs, u, ut, ur, mask)


def initial_data(p: PhasePoint, r):
    """(u(0, r), du/dt(0, r)) = (2X/(1+r^2), 4Y/(1+r^2)^2)."""
    r = np.asarray(r, dtype=float)
    w = 1.0 / (1.0 + r * r)
    return 2.0 * p.X * w, 4.0 * p.Y * w * w


def pde_residual(p: PhasePoint, t: float, r: float, h: float, cfg: Config = DEFAULT) -> float:
    """Centred-difference residual of u_tt - u_rr - (2/r) u_r - u^3."""
    ts = t + h * np.array([-1.0, 0.0, 1.0])
    rs = r + h * np.array([-1.0, 0.0, 1.0])
    ut = field_value(p, ts, np.full(3, r), cfg)
    ur = field_value(p, np.full(3, t), rs, cfg)
    u0 = ut[1]
    u_tt = (ut[0] - 2 * u0 + ut[2]) / h ** 2
    u_rr = (ur[0] - 2 * u0 + ur[2]) / h ** 2
    u_r = (ur[2] - ur[0]) / (2 * h)
    return float(u_tt - u_rr - 2.0 / r * u_r - u0 ** 3)
