"""Lifespan of the profile ODE from the quadratures R and S.

Every integrand has the form dv / sqrt(P(v)) with
P(v) = 2E - v^2 + v^4/2. For E < 1/4 it factors as
P = (v^2 - (1+lam)) (v^2 - (1-lam)) / 2 with lam = sqrt(1 - 4E); for E > 1/4
it is written as (v^2-1)^2/2 + (2E - 1/2). Both forms avoid cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .config import DEFAULT, Config
from .duffing import PhasePoint, energy, energy_gap
from .quadrature import RULES

SQRT2 = math.sqrt(2.0)
INF = math.inf

# |E - 1/4| below this is treated as exactly 1/4
QUARTER_BAND = 1e-12


@dataclass(frozen=True)
class Lifespan:
    t_minus: float
    t_plus: float

    @property
    def finite_minus(self) -> bool:
        return math.isfinite(self.t_minus)

    @property
    def finite_plus(self) -> bool:
        return math.isfinite(self.t_plus)


def _rule(name: str):
    try:
        return RULES[name]
    except KeyError:
        raise ValueError(f"unknown quadrature rule {name!r}") from None


def _below_regime(gap: float):
    """(lam, v_plus) for 2E - 1/2 = gap < 0."""
    lam = math.sqrt(-2.0 * gap)
    return lam, math.sqrt(1.0 + lam)


def _outer_below(a: float, gap: float, cfg: Config, rule: str) -> float:
    """Integral over (a, inf) when E < 1/4 and a >= v_plus."""
    lam, vp = _below_regime(gap)
    quad = _rule(rule)
    c = max(cfg.tail_cut, 2.0 * vp, a)

    def f_x(x):
        # v = vp + x^2 absorbs the inverse square root at the turning point
        x2 = x * x
        return 2.0 * SQRT2 / np.sqrt((x2 + 2.0 * vp) * (x2 * x2 + 2.0 * x2 * vp + 2.0 * lam))

    def f_tail(w):
        w2 = w * w
        return 1.0 / np.sqrt(0.5 * (1.0 - (1.0 + lam) * w2) * (1.0 - (1.0 - lam) * w2))

    head = quad(f_x, math.sqrt(max(a - vp, 0.0)), math.sqrt(c - vp), cfg.rel_tol, cfg.abs_tol)
    return head + quad(f_tail, 0.0, 1.0 / c, cfg.rel_tol, cfg.abs_tol)


def _inner_below(b: float, gap: float, cfg: Config, rule: str) -> float:
    """Integral over (v_plus, b) when E < 1/4 and b >= v_plus."""
    lam, vp = _below_regime(gap)

    def f_x(x):
        x2 = x * x
        return 2.0 * SQRT2 / np.sqrt((x2 + 2.0 * vp) * (x2 * x2 + 2.0 * x2 * vp + 2.0 * lam))

    return _rule(rule)(f_x, 0.0, math.sqrt(max(b - vp, 0.0)), cfg.rel_tol, cfg.abs_tol)


def _outer_above(a: float, gap: float, cfg: Config, rule: str) -> float:
    """Integral over (a, inf) when E > 1/4 (no real turning points)."""
    quad = _rule(rule)
    c = max(cfg.tail_cut, a)

    def f(v):
        return 1.0 / np.sqrt(0.5 * (v * v - 1.0) ** 2 + gap)

    def f_tail(w):
        w2 = w * w
        return 1.0 / np.sqrt(0.5 * (1.0 - w2) ** 2 + gap * w2 * w2)

    head = quad(f, a, c, cfg.rel_tol, cfg.abs_tol, points=(-1.0, 1.0)) if a < c else 0.0
    return head + quad(f_tail, 0.0, 1.0 / c, cfg.rel_tol, cfg.abs_tol, points=(1.0,))


def _outer(a: float, gap: float, cfg: Config, rule: str) -> float:
    """Integral of dv/sqrt(P) over (a, inf), +inf when it diverges."""
    if abs(gap) <= 2.0 * QUARTER_BAND:
        return SQRT2 * math.atanh(1.0 / a) if a > 1.0 else INF
    if gap > 0:
        return _outer_above(a, gap, cfg, rule)
    _, vp = _below_regime(gap)
    if a < vp:
        return INF
    return _outer_below(a, gap, cfg, rule)


def _lower_limit(p: PhasePoint) -> float:
    return abs(p.X) if p.Y == 0 else math.copysign(p.X, p.X * p.Y)


def quad_R(p: PhasePoint, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """R(X, Y): integral of dv/sqrt(2E - v^2 + v^4/2) from X sign(Y) to infinity."""
    return _outer(_lower_limit(p), energy_gap(p), cfg, rule)


def quad_S(p: PhasePoint, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """S(X, Y): both branches from the outer turning point, for E < 1/4, |X| > 1."""
    gap = energy_gap(p)
    if not (gap < -2.0 * QUARTER_BAND and abs(p.X) > 1.0):
        return INF
    _, vp = _below_regime(gap)
    return (_inner_below(abs(p.X), gap, cfg, rule)
            + _outer_below(vp, gap, cfg, rule))


def t_plus(p: PhasePoint, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """Forward lifespan T+(X, Y)."""
    gap = energy_gap(p)
    X, Y = p.X, p.Y
    if abs(gap) <= 2.0 * QUARTER_BAND:
        if abs(X) > 1.0 and X * Y > 0:
            return SQRT2 * math.atanh(1.0 / abs(X))
        return INF
    if gap > 0:
        return quad_R(p, cfg, rule)
    if abs(X) <= 1.0:
        return INF
    if X * Y >= 0:
        return quad_R(p, cfg, rule)
    return quad_S(p, cfg, rule)


def t_minus(p: PhasePoint, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """Backward lifespan T-(X, Y) = -T+(X, -Y)."""
    return -t_plus(p.reflected(), cfg, rule)


def lifespan(p: PhasePoint, cfg: Config = DEFAULT) -> Lifespan:
    return Lifespan(t_minus(p, cfg), t_plus(p, cfg))


def total_lifespan_by_energy(E: float, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """T+ + |T-| as a function of the energy alone."""
    gap = 2.0 * E - 0.5
    if abs(gap) <= 2.0 * QUARTER_BAND:
        return INF
    if gap > 0:
        return 2.0 * _outer_above(0.0, gap, cfg, rule)
    _, vp = _below_regime(gap)
    return 2.0 * _outer_below(vp, gap, cfg, rule)


def _brent(f, a: float, b: float, cfg: Config) -> float:
    return optimize.brentq(f, a, b, xtol=1e-15, rtol=max(cfg.rel_tol, 1e-15), maxiter=200)


def e_infinity(cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """The energy above 1/4 whose total lifespan equals pi."""
    lo = 0.25 + 1e-6
    hi = 1.0
    f = lambda E: total_lifespan_by_energy(E, cfg, rule) - math.pi  # noqa: E731
    while f(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise RuntimeError("failed to bracket E_infinity")
    return _brent(f, lo, hi, cfg)


def boundary_tplus(X: float, cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """T+ on the boundary Y = 0 for 1 < |X| <= sqrt 2.

    The hyperbolic-cosine form is mapped to (0, 1] by z = exp(-w), which keeps
    the integrand bounded.
    """
    X2 = X * X
    if X2 <= 1.0:
        return INF

    def f(z):
        z2 = z * z
        return 1.0 / np.sqrt(0.25 * X2 * (1.0 + z2) ** 2 + (X2 - 2.0) * z2)

    return SQRT2 * _rule(rule)(f, 0.0, 1.0, cfg.rel_tol, cfg.abs_tol)


def x_critical(cfg: Config = DEFAULT, rule: str = "gk") -> float:
    """The X_C in (1, sqrt 2) with boundary_tplus(X_C) = pi."""
    f = lambda X: boundary_tplus(X, cfg, rule) - math.pi  # noqa: E731
    return _brent(f, 1.0 + 1e-9, SQRT2, cfg)


__all__ = [
    "Lifespan", "quad_R", "quad_S", "t_plus", "t_minus", "lifespan",
    "total_lifespan_by_energy", "e_infinity", "boundary_tplus", "x_critical",
    "energy",
]
