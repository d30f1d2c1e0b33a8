"""Threshold curve beta(X) and the blow-up / scattering / threshold classification."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import optimize

from .config import DEFAULT, Config
from .duffing import PhasePoint
from .lifespan import t_plus, x_critical

SQRT2 = math.sqrt(2.0)


class Behavior(str, Enum):
    Blowup = "Blowup"
    Scattering = "Scattering"
    Threshold = "Threshold"


@dataclass(frozen=True)
class Classification:
    forward: Behavior
    backward: Behavior

    @property
    def label(self) -> str:
        return f"{self.forward.value}/{self.backward.value}"


class BracketError(RuntimeError):
    """The root bracket for beta could not be established."""


@dataclass(frozen=True)
class ThresholdCurve:
    xs: np.ndarray
    betas: np.ndarray
    x_c: float


@lru_cache(maxsize=16)
def _x_c(cfg: Config) -> float:
    return x_critical(cfg)


def _gap_fn(X: float, cfg: Config):
    # 1/pi - 1/T+ is finite on the whole bracket (T+ may be infinite)
    def f(Y: float) -> float:
        return 1.0 / math.pi - 1.0 / t_plus(PhasePoint(X, Y), cfg)
    return f


@lru_cache(maxsize=4096)
def _beta_cached(X: float, cfg: Config) -> float:
    xc = _x_c(cfg)
    f = _gap_fn(X, cfg)
    if X > xc:
        lo = -abs(X * X - 1.0) / SQRT2
        hi = 0.0
        if f(hi) >= 0:  # X within rounding of X_C
            return 0.0
        return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=300)
    lo = 0.0 if X > 1.0 else abs(X * X - 1.0) / SQRT2
    if f(lo) <= 0:
        return lo
    hi = lo + max(1.0, X * X)
    while f(hi) > 0:
        lo, hi = hi, lo + 2.0 * (hi - lo)
        if hi > cfg.beta_bracket_limit:
            raise BracketError(f"no sign change for beta({X}) below Y={hi}")
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=300)


def beta(X: float, cfg: Config = DEFAULT) -> float:
    """The Y with T+(X, Y) = pi on the branch fixed by the sign of X - X_C."""
    return _beta_cached(float(X), cfg)


def classify_forward(p: PhasePoint, cfg: Config = DEFAULT) -> Behavior:
    upper = beta(p.X, cfg)
    lower = -beta(-p.X, cfg)
    band = cfg.threshold_band
    if abs(p.Y - upper) <= band or abs(p.Y - lower) <= band:
        return Behavior.Threshold
    if p.Y > upper or p.Y < lower:
        return Behavior.Blowup
    return Behavior.Scattering


def classify_bidirectional(p: PhasePoint, cfg: Config = DEFAULT) -> Classification:
    """Forward behaviour and the behaviour of the time-reversed solution."""
    return Classification(classify_forward(p, cfg), classify_forward(p.reflected(), cfg))


def special_points(cfg: Config = DEFAULT) -> list[PhasePoint]:
    """The four points that are threshold in both time directions."""
    xc = _x_c(cfg)
    b0 = beta(0.0, cfg)
    return [PhasePoint(xc, 0.0), PhasePoint(-xc, 0.0), PhasePoint(0.0, b0), PhasePoint(0.0, -b0)]


def beta_curve(x_min: float, x_max: float, n: int, cfg: Config = DEFAULT) -> ThresholdCurve:
    if n < 2:
        raise ValueError("beta_curve needs n >= 2")
    xs = np.linspace(x_min, x_max, n)
    betas = np.array([beta(x, cfg) for x in xs])
    if np.any(np.diff(betas) >= 0):
        raise RuntimeError("sampled beta is not strictly decreasing")
    return ThresholdCurve(xs, betas, _x_c(cfg))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid [x0, x1] x [y0, y1] with nx by ny nodes."""

    x0: float
    x1: float
    nx: int
    y0: float
    y1: float
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one node per axis")
        for v in (self.x0, self.x1, self.y0, self.y1):
            if not math.isfinite(v):
                raise ValueError("grid bounds must be finite")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny)


@dataclass
class PhaseDiagram:
    """Node classifications (rows follow ys, columns follow xs).

    ``curve_points`` lists, for each grid column, the four points where the
    column meets the threshold curves Y = beta(X), -beta(-X), beta(-X),
    -beta(X). A rectangular grid meets these curves only by accident, so the
    threshold cells are reported there.
    """

    xs: np.ndarray
    ys: np.ndarray
    cells: list[list[Classification]]
    curve_points: list[tuple[PhasePoint, Classification]] = field(default_factory=list)

    def labels(self) -> np.ndarray:
        return np.array([[c.label for c in row] for row in self.cells])

    def classes_present(self) -> set[str]:
        found = {c.label for row in self.cells for c in row}
        found.update(c.label for _, c in self.curve_points)
        return found


def _classify_with(Y: float, X: float, b: dict, band: float) -> Behavior:
    upper, lower = b[X], -b[-X]
    if abs(Y - upper) <= band or abs(Y - lower) <= band:
        return Behavior.Threshold
    if Y > upper or Y < lower:
        return Behavior.Blowup
    return Behavior.Scattering


def phase_diagram(grid: GridSpec, cfg: Config = DEFAULT, workers: int | None = None) -> PhaseDiagram:
    """Classify every grid node in both time directions."""
    xs, ys = grid.xs, grid.ys
    needed = sorted({float(x) for x in xs} | {float(-x) for x in xs})
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            vals = list(ex.map(lambda x: beta(x, cfg), needed))
    else:
        vals = [beta(x, cfg) for x in needed]
    b = dict(zip(needed, vals))
    band = cfg.threshold_band
    cells = [[Classification(_classify_with(float(y), float(x), b, band),
                             _classify_with(-float(y), float(x), b, band))
              for x in xs] for y in ys]
    curve = []
    for x in xs:
        x = float(x)
        for y in (b[x], -b[-x], b[-x], -b[x]):
            curve.append((PhasePoint(x, y), Classification(_classify_with(y, x, b, band),
                                                           _classify_with(-y, x, b, band))))
    return PhaseDiagram(xs, ys, cells, curve)
