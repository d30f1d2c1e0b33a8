"""The conformal profile ODE U'' + U = U^3.

Adaptive integration with blow-up detection, dense state queries, closed-form
reference solutions and the near-blow-up asymptote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy import integrate as _spi

from . import kernels
from .config import DEFAULT, Config

SQRT2 = math.sqrt(2.0)

# half-width of the conformal time window needed by the physical field
FIELD_SPAN = math.pi + 0.25


class ParameterError(ValueError):
    """Parameters outside the admissible range of a formula."""


class LifespanError(ValueError):
    """Query outside the (numerically detected) lifespan."""

    def __init__(self, message: str, t_minus: float, t_plus: float):
        super().__init__(message)
        self.t_minus = t_minus
        self.t_plus = t_plus


class StepSizeUnderflow(RuntimeError):
    """The adaptive step collapsed before reaching the requested time."""

    def __init__(self, s: float):
        super().__init__(f"step size underflow at s={s!r}")
        self.s = s


@dataclass(frozen=True)
class PhasePoint:
    """Initial data (U(0), U'(0)) = (X, Y)."""

    X: float
    Y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.X) and math.isfinite(self.Y)):
            raise ParameterError(f"phase point must be finite, got ({self.X}, {self.Y})")
        object.__setattr__(self, "X", float(self.X))
        object.__setattr__(self, "Y", float(self.Y))

    def reflected(self) -> "PhasePoint":
        """(X, -Y): the time-reversed solution."""
        return PhasePoint(self.X, -self.Y)

    def negated(self) -> "PhasePoint":
        """(-X, -Y): the solution -U."""
        return PhasePoint(-self.X, -self.Y)


@dataclass(frozen=True)
class OdeState:
    s: float
    U: float
    Udot: float


def energy(p: PhasePoint) -> float:
    """E = Y^2/2 + X^2/2 - X^4/4."""
    return energy_of(p.X, p.Y)


def energy_of(U, Udot):
    """Energy of arbitrary (arrays of) states."""
    return 0.5 * Udot * Udot + 0.5 * U * U - 0.25 * U ** 4


def energy_gap(p: PhasePoint) -> float:
    """2E - 1/2 written without cancellation: Y^2 - (X^2 - 1)^2 / 2."""
    return p.Y * p.Y - 0.5 * (p.X * p.X - 1.0) ** 2


def _energy_scale(U, Udot):
    return 0.5 * Udot * Udot + 0.5 * U * U + 0.25 * U ** 4


def tail_time(U: float, E: float) -> float:
    """Conformal time needed to go from |U| to infinity at energy E.

    Evaluates the integral of dv / sqrt(2E - v^2 + v^4/2) over (|U|, inf)
    after the substitution v = 1/w. Requires |U| beyond the outer turning point.
    """
    a = abs(U)
    if a < 10.0:
        raise ParameterError("tail_time expects |U| in the asymptotic range")
    val, _ = _spi.quad(lambda w: 1.0 / math.sqrt(0.5 - w * w + 2.0 * E * w ** 4), 0.0, 1.0 / a,
                       epsabs=0.0, epsrel=1e-13)
    return val


@dataclass
class OdeTrajectory:
    """Adaptive solution from s=0 toward s_end.

    ``s``, ``U`` and ``Udot`` are the accepted step nodes; ``rcont`` holds the
    dense-output coefficients between consecutive nodes. When the run stops at
    the blow-up cutoff, ``blowup_time`` is the refined singular time.
    """

    origin: PhasePoint
    s: np.ndarray
    U: np.ndarray
    Udot: np.ndarray
    rcont: np.ndarray
    truncated_at_blowup: bool
    blowup_side: int | None
    blowup_time: float | None
    energy_drift: float

    @property
    def states(self) -> list[OdeState]:
        return [OdeState(float(a), float(b), float(c)) for a, b, c in zip(self.s, self.U, self.Udot)]

    @property
    def s_last(self) -> float:
        return float(self.s[-1])

    def evaluate(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Dense output at points inside the covered interval."""
        q = np.atleast_1d(np.asarray(s, dtype=float))
        if len(self.s) < 2:
            return np.full(q.shape, self.U[0]), np.full(q.shape, self.Udot[0])
        out = kernels.dense_eval(self.s, self.rcont, np.ascontiguousarray(q.ravel()))
        out = np.asarray(out)
        return out[:, 0].reshape(q.shape), out[:, 1].reshape(q.shape)


def integrate(p: PhasePoint, s_end: float, cfg: Config = DEFAULT) -> OdeTrajectory:
    """Integrate U'' + U = U^3 from (X, Y) at s=0 toward ``s_end``.

    Stops early when |U| reaches ``cfg.blowup_cutoff``; the singular time is
    then refined with the residual tail integral.
    """
    if not math.isfinite(s_end):
        raise ParameterError("s_end must be finite")
    tol = cfg.ode_tol * cfg.ode_headroom
    s, y, rcont, status = kernels.integrate(p.X, p.Y, float(s_end), tol, tol,
                                            cfg.blowup_cutoff, cfg.max_steps)
    s = np.asarray(s)
    y = np.asarray(y)
    if status == 2:
        raise StepSizeUnderflow(float(s[-1]))
    if status == 3:
        raise RuntimeError(f"step budget exhausted at s={s[-1]!r}")
    U, Udot = y[:, 0].copy(), y[:, 1].copy()
    E0 = energy(p)
    drift = np.abs(energy_of(U, Udot) - E0) / np.maximum(1.0, _energy_scale(U, Udot))
    truncated = status == 1
    side = None
    t_blow = None
    if truncated:
        side = 1 if U[-1] > 0 else -1
        direction = 1.0 if s_end > 0 else -1.0
        t_blow = float(s[-1]) + direction * tail_time(U[-1], E0)
    return OdeTrajectory(p, s, U, Udot, np.asarray(rcont), truncated, side, t_blow,
                         float(drift.max()))


@dataclass
class DenseSolution:
    """Forward and backward trajectories covering [-span, span] or the lifespan."""

    origin: PhasePoint
    forward: OdeTrajectory
    backward: OdeTrajectory
    guard: float

    @property
    def t_plus(self) -> float:
        return self.forward.blowup_time if self.forward.truncated_at_blowup else math.inf

    @property
    def t_minus(self) -> float:
        return self.backward.blowup_time if self.backward.truncated_at_blowup else -math.inf

    @property
    def s_max(self) -> float:
        return self.t_plus - self.guard if self.forward.truncated_at_blowup else self.forward.s_last

    @property
    def s_min(self) -> float:
        return self.t_minus + self.guard if self.backward.truncated_at_blowup else self.backward.s_last

    def covers(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return (s >= self.s_min) & (s <= self.s_max)

    def evaluate(self, s) -> tuple[np.ndarray, np.ndarray]:
        """(U, U') at each s; raises LifespanError if any s is not covered."""
        s = np.asarray(s, dtype=float)
        if not np.all(self.covers(s)):
            raise LifespanError(
                f"s outside the resolved lifespan [{self.s_min}, {self.s_max}]",
                self.t_minus, self.t_plus)
        U = np.empty(s.shape)
        V = np.empty(s.shape)
        for traj, mask in ((self.forward, s >= 0.0), (self.backward, s < 0.0)):
            if not mask.any():
                continue
            q = s[mask]
            inside = (q <= traj.s_last) if traj is self.forward else (q >= traj.s_last)
            u = np.empty(q.shape)
            v = np.empty(q.shape)
            if inside.any():
                u[inside], v[inside] = traj.evaluate(q[inside])
            if (~inside).any():
                # beyond the cutoff the solution equals the asymptote to rounding
                T = traj.blowup_time
                tau = np.abs(T - q[~inside])
                sgn = traj.blowup_side
                u[~inside] = sgn * SQRT2 / tau
                orient = 1.0 if traj is self.forward else -1.0
                v[~inside] = orient * sgn * SQRT2 / tau ** 2
            U[mask] = u
            V[mask] = v
        return U, V


@lru_cache(maxsize=256)
def _dense_cached(X: float, Y: float, span: float, cfg: Config) -> DenseSolution:
    p = PhasePoint(X, Y)
    return DenseSolution(p, integrate(p, span, cfg), integrate(p, -span, cfg), cfg.domain_guard)


def dense_solution(p: PhasePoint, cfg: Config = DEFAULT, span: float = FIELD_SPAN) -> DenseSolution:
    """Cached dense solution on [-span, span] (or up to blow-up)."""
    return _dense_cached(p.X, p.Y, float(span), cfg)


def state_at(p: PhasePoint, s: float, cfg: Config = DEFAULT) -> OdeState:
    """(U(s), U'(s)) by dense output over a cached solve."""
    span = max(FIELD_SPAN, math.ceil(abs(s)) + 1.0)
    sol = dense_solution(p, cfg, span)
    U, V = sol.evaluate(np.array([s]))
    return OdeState(float(s), float(U[0]), float(V[0]))


# closed-form reference solutions

class Kind(str, Enum):
    EQuarter = "EQuarter"
    EZero = "EZero"
    EllipticSn = "EllipticSn"
    Constant = "Constant"


def _sign(params: Mapping[str, float]) -> float:
    sg = params.get("sign", 1.0)
    if sg not in (1, -1, 1.0, -1.0):
        raise ParameterError("sign must be +1 or -1")
    return float(sg)


def explicit_solution(kind: Kind | str, params: Mapping[str, float], s):
    """Closed-form U(s) for the explicit families.

    EQuarter (energy 1/4): params X (|X| != 1), sign = sign of U'(0).
    EZero (energy 0): params X (|X| > sqrt 2), sign = sign of U'(0).
    EllipticSn: params A (0 < |A| < sqrt 2), theta; U = A sn(w s + theta, k^2)
    with w^2 = 1 - A^2/2 and k^2 = A^2/(2 - A^2).
    Constant: params X in {-1, 0, 1}.
    """
    kind = Kind(kind)
    s = np.asarray(s, dtype=float)
    if kind is Kind.EQuarter:
        X = float(params["X"])
        sg = _sign(params)
        if abs(X) < 1.0:
            return np.tanh(sg * s / SQRT2 + math.atanh(X))
        if abs(X) > 1.0:
            return 1.0 / np.tanh(math.atanh(1.0 / X) - sg * s / SQRT2)
        raise ParameterError("EQuarter needs |X| != 1 (use Constant)")
    if kind is Kind.EZero:
        X = float(params["X"])
        if not abs(X) > SQRT2:
            raise ParameterError("EZero needs |X| > sqrt(2)")
        sg = _sign(params)
        return SQRT2 / np.sin(math.asin(SQRT2 / X) - sg * s)
    if kind is Kind.EllipticSn:
        A = float(params["A"])
        theta = float(params.get("theta", 0.0))
        if not abs(A) < SQRT2:
            raise ParameterError("EllipticSn needs |A| < sqrt(2)")
        w = math.sqrt(1.0 - 0.5 * A * A)
        m = A * A / (2.0 - A * A)
        x = w * s + theta
        if m < 1.0:
            return A * jacobi_sn(x, m)
        if m == 1.0:
            return A * np.tanh(x)
        # reciprocal-modulus transformation
        return A * jacobi_sn(math.sqrt(m) * x, 1.0 / m) / math.sqrt(m)
    X = float(params.get("X", 1.0))
    if X not in (-1.0, 0.0, 1.0):
        raise ParameterError("Constant solutions are U = -1, 0, 1")
    return np.full(s.shape, X)


def explicit_blowup_time(kind: Kind | str, params: Mapping[str, float]) -> float:
    """Forward singular time of a closed-form family member (inf if global)."""
    kind = Kind(kind)
    if kind is Kind.EZero:
        X = float(params["X"])
        a = abs(math.asin(SQRT2 / X))
        return a if X * _sign(params) > 0 else math.pi - a
    if kind is Kind.EQuarter:
        X = float(params["X"])
        if abs(X) > 1.0 and X * _sign(params) > 0:
            return SQRT2 * math.atanh(1.0 / abs(X))
        return math.inf
    return math.inf


def explicit_initial_point(kind: Kind | str, params: Mapping[str, float]) -> PhasePoint:
    """The phase point (U(0), U'(0)) of a closed-form family member."""
    kind = Kind(kind)
    if kind is Kind.EQuarter:
        X = float(params["X"])
        return PhasePoint(X, _sign(params) * abs(X * X - 1.0) / SQRT2)
    if kind is Kind.EZero:
        X = float(params["X"])
        return PhasePoint(X, _sign(params) * math.sqrt(0.5 * X ** 4 - X * X))
    if kind is Kind.EllipticSn:
        A = float(params["A"])
        h = 1e-5
        U = explicit_solution(kind, params, np.array([-h, 0.0, h]))
        X = float(U[1])
        # the energy is A^2/2 - A^4/4 on both sides of |A| = 1
        Y = math.sqrt(max(A * A - 0.5 * A ** 4 - X * X + 0.5 * X ** 4, 0.0))
        return PhasePoint(X, math.copysign(Y, U[2] - U[0]))
    return PhasePoint(float(params.get("X", 1.0)), 0.0)


# Jacobi elliptic sine

def _agm_ladder(m: float, eps: float = 1e-17):
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    ladder = [(a, c)]
    for _ in range(60):
        if abs(c) <= eps * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        ladder.append((a, c))
    return ladder


def elliptic_k(m: float) -> float:
    """Complete elliptic integral K(m) = pi / (2 AGM(1, sqrt(1-m)))."""
    if not 0.0 <= m < 1.0:
        raise ParameterError("K(m) needs m in [0, 1)")
    return math.pi / (2.0 * _agm_ladder(m)[-1][0])


def jacobi_sn(u, m: float):
    """Jacobi sn(u | m) by the descending Landen (AGM) recursion."""
    if not 0.0 <= m < 1.0:
        raise ParameterError("jacobi_sn needs m in [0, 1)")
    u = np.asarray(u, dtype=float)
    if m == 0.0:
        return np.sin(u)
    ladder = _agm_ladder(m)
    n = len(ladder) - 1
    phi = (2.0 ** n) * ladder[-1][0] * u
    for k in range(n, 0, -1):
        a, c = ladder[k]
        phi = 0.5 * (phi + np.arcsin(np.clip(c / a * np.sin(phi), -1.0, 1.0)))
    return np.sin(phi)


def blowup_asymptote(T_plus: float, s, sign: int = 1):
    """Leading singular behaviour (sign sqrt2/(T-s), sign sqrt2/(T-s)^2)."""
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    tau = T_plus - np.asarray(s, dtype=float)
    if np.any(tau <= 0):
        raise ParameterError("s must lie before the singular time")
    return sign * SQRT2 / tau, sign * SQRT2 / tau ** 2
