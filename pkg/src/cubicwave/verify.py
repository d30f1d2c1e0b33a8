"""Acceptance checks grouped into named suites."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import asymptotics as asy
from . import norms
from .config import DEFAULT, Config
from .duffing import PhasePoint
from .lifespan import (boundary_tplus, e_infinity, t_plus, total_lifespan_by_energy,
                       x_critical)
from .penrose import RadialField, physical_blowup_time
from .threshold import beta

SQRT2 = math.sqrt(2.0)
SEED = 20240611
BLOWUP_POINT = PhasePoint(1.0, 1.5)


@dataclass
class Check:
    """One measured quantity against its target."""

    name: str
    measured: float
    target: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = asdict(self)
        for k in ("measured", "target", "tolerance"):
            rec[k] = _finite_or_str(rec[k])
        rec["detail"] = {k: _finite_or_str(v) for k, v in self.detail.items()}
        return rec


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check]
    seconds: float
    budget: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.seconds <= self.budget

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{c.name}={c.measured:.6g}" for c in self.checks)
        return f"[{tag}] {self.number:2d} {self.title}: {worst} ({self.seconds:.1f}s/{self.budget:.0f}s)"


def _finite_or_str(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (np.floating,)):
        return _finite_or_str(float(v))
    return v


def _abs_check(name, measured, target, tol, **detail) -> Check:
    return Check(name, float(measured), float(target), tol, abs(measured - target) <= tol, detail)


def _rel_check(name, measured, target, tol, **detail) -> Check:
    rel = abs(measured - target) / abs(target)
    return Check(name, float(measured), float(target), tol, rel <= tol, dict(detail, rel_error=rel))


def _max_check(name, measured, bound, **detail) -> Check:
    return Check(name, float(measured), float(bound), float(bound), measured <= bound, detail)


# criteria

def c01(cfg: Config) -> list[Check]:
    p = PhasePoint(2.0, 2.0)
    return [_abs_check("t_plus", t_plus(p, cfg), math.pi / 4, 1e-8),
            _abs_check("physical_t_plus", physical_blowup_time(p, cfg), math.tan(math.pi / 8), 1e-8)]


def c02(cfg: Config) -> list[Check]:
    target = SQRT2 * math.atanh(0.5)
    on_quarter = PhasePoint(2.0, 3.0 / SQRT2)
    literal = PhasePoint(2.0, 1.5)
    return [_abs_check("t_plus(2,3/sqrt2)", t_plus(on_quarter, cfg), target, 1e-8,
                       literal_point_t_plus=t_plus(literal, cfg))]


def c03(cfg: Config) -> list[Check]:
    return [_abs_check("total_lifespan(E=0)", total_lifespan_by_energy(0.0, cfg), math.pi, 1e-8)]


def c04(cfg: Config) -> list[Check]:
    xc = x_critical(cfg)
    ei = e_infinity(cfg)
    return [_abs_check("boundary_tplus(X_C)", boundary_tplus(xc, cfg), math.pi, 1e-8, X_C=xc),
            _abs_check("total_lifespan(E_inf)", total_lifespan_by_energy(ei, cfg), math.pi, 1e-8, E_inf=ei)]


def c05(cfg: Config) -> list[Check]:
    xs = np.random.default_rng(SEED).uniform(-3.0, 3.0, 30)
    errs = [abs(t_plus(PhasePoint(float(x), beta(float(x), cfg)), cfg) - math.pi) for x in xs]
    return [_max_check("max|t_plus(X,beta(X))-pi|", max(errs), 1e-6, samples=len(xs))]


def c06(cfg: Config) -> list[Check]:
    rng = np.random.default_rng(SEED + 6)
    pts = rng.uniform(-3.0, 3.0, (5, 2))
    rhos = np.geomspace(1e-8, 60.0, 4001)
    worst, at = 0.0, None
    for X, Y in pts:
        lhs = norms.data_norm_identity(float(X), float(Y), rhos, cfg)
        rhs = 2.0 * math.pi ** 2 * (X * X + Y * Y)
        rel = abs(lhs - rhs) / rhs
        if rel >= worst:
            worst, at = rel, (float(X), float(Y))
    return [_max_check("max_rel_error", worst, 1e-5, worst_point=str(at))]


def c07(cfg: Config) -> list[Check]:
    p = BLOWUP_POINT
    taus = asy.geometric_times(1e-3, 1e-1)
    tg = asy.blowup_targets(p, cfg)
    out = []
    for kind in ("L3", "Ut_L32"):
        fit = asy.blowup_rate_check(p, taus, kind, cfg)
        raw = fit.values / tg[kind] - 1.0
        out.append(_rel_check(f"{kind}_limit", fit.coefficient, tg[kind], 0.01,
                              fit_residual=fit.residual,
                              raw_max_rel=float(np.max(np.abs(raw))),
                              raw_at_smallest_tau=float(raw[0])))
    return out


def _surface_points(p: PhasePoint, cfg: Config):
    return [(asy.surface_time(p, r, cfg), r) for r in (0.0, 1.0)]


def c08(cfg: Config) -> list[Check]:
    p = BLOWUP_POINT
    sig = np.arange(2.0, 6.0001, 0.5)
    ys = np.linspace(-0.95, 0.95, 39)
    out = []
    for ts, rs in _surface_points(p, cfg):
        fit = asy.profile_deviation_fit(asy.blowup_profile(p, ts, rs, sig, ys, cfg))
        ratio = asy.profile_ratio_test(fit)
        # deviation <= K e^-sigma with K the largest e^sigma * deviation
        K = max(v * math.exp(s) for s, v in fit.samples)
        out.append(Check(f"ratio_test(r*={rs:g})", ratio, 2.0, 2.0, ratio <= 2.0 and fit.exponent_or_slope > 0.5,
                         {"K": K, "fitted_exponent": fit.exponent_or_slope, "t_star": ts,
                          "d": asy.profile_slope(ts, rs)}))
    return out


ATTRACTOR_RS = np.concatenate([np.linspace(0.0, 10.0, 2001), np.geomspace(10.0, 1e4, 400)[1:]])


def c09(cfg: Config) -> list[Check]:
    p = BLOWUP_POINT
    taus = asy.geometric_times(1e-3, 1e-1)
    fit = asy.attractor_deviation(p, taus, ATTRACTOR_RS, cfg)
    ratios = fit.values
    # bounded: the ratio must not keep growing as tau shrinks
    growth = float(ratios[0] / ratios[-1])
    local = [asy.attractor_deviation(p, [tau], np.linspace(0.0, math.sqrt(tau), 201), cfg).coefficient
             for tau in taus]
    literal = Check("sup_r ratio growth", growth, 10.0, 10.0, growth <= 10.0,
                    {"ratio_at_tau_min": float(ratios[0]), "ratio_at_tau_max": float(ratios[-1]),
                     "log_slope_of_deviation": fit.exponent_or_slope,
                     "parabolic_zone_max_ratio": float(max(local))})
    q = PhasePoint(2.0, 2.0)
    tq = physical_blowup_time(q, cfg)
    worst = 0.0
    for tau in taus:
        t = tq - tau
        f = asy.sample_field(q, t, ATTRACTOR_RS, cfg)
        att = asy.attractor(q, t, ATTRACTOR_RS, cfg)
        worst = max(worst, float(np.max(np.abs(f.u - att) / np.abs(att))))
    exact = _max_check("E=0 relative deviation", worst, 1e-8)
    return [literal, exact]


def c10(cfg: Config) -> list[Check]:
    from .threshold import beta as _b
    p = PhasePoint(0.0, _b(0.0, cfg))
    ts = asy.geometric_times(1e2, 1e4)
    half = asy.threshold_sobolev_asymptotic(p, 0.5, ts, cfg)
    l2 = asy.threshold_lp_asymptotic(p, ts, 2.0, cfg)
    hi = asy.threshold_sobolev_asymptotic(p, 0.75, ts, cfg)
    return [_rel_check("H1/2_slope", half.coefficient, 64.0 * math.pi ** 3, 0.05, residual=half.residual),
            _rel_check("L2_coefficient", l2.coefficient, asy.lp_coefficient(2.0), 0.02,
                       fitted_exponent=l2.exponent_or_slope),
            _max_check("H0.75_max/min", hi.exponent_or_slope, 10.0)]


def c11(cfg: Config) -> list[Check]:
    p = PhasePoint(0.0, beta(0.0, cfg))
    ts = asy.geometric_times(10.0, 1e3)
    ext = asy.exterior_scattering_check(p, ts, 0.0, cfg)
    vals = ext.values
    out = [_max_check("exterior_energy(1e3)/exterior_energy(10)", ext.coefficient, 0.01,
                      decay_slope=ext.exponent_or_slope,
                      t_times_energy_at_1e3=float(ts[-1] * vals[-1]), eight_pi=8.0 * math.pi,
                      monotone=bool(np.all(np.diff(vals) < 0)))]
    wave = asy.free_wave_for(p, 2.0 * (ts[-1] + 3.0) + 10.0, cfg)
    for eta in (-3.0, 0.0, 3.0):
        v, _ = asy.transition_values(p, ts, eta, cfg, wave)
        out.append(_rel_check(f"transition(eta={eta:g})", float(v[-1]), SQRT2, 0.01))
    return out


def _field(r, u) -> RadialField:
    return RadialField(0.0, r, u, u, u, np.ones_like(r, dtype=bool))


def c12(cfg: Config) -> list[Check]:
    r = np.concatenate([np.linspace(0.0, 10.0, 2001)[:-1], np.geomspace(10.0, 1e5, 4000)])
    u0 = 2.0 / (1.0 + r * r)
    u1 = 4.0 / (1.0 + r * r) ** 2
    rhos = np.geomspace(1e-6, 60.0, 400)
    cases = [
        ("u0 in L^p", lambda e: not norms.lp_norm(_field(r, u0), e).divergent, 1.5),
        ("u1 in L^p", lambda e: not norms.lp_norm(_field(r, u1), e).divergent, 0.75),
        ("u0 in H^s", lambda e: not norms.sobolev_norm_sampled(r, u0, e, cfg, rhos).divergent, -0.5),
        ("u1 in H^s", lambda e: not norms.sobolev_norm_sampled(r, u1, e, cfg, rhos).divergent, -1.5),
    ]
    out = []
    for name, finite, crit in cases:
        below, above = finite(crit - 0.05), finite(crit + 0.05)
        ok = (not below) and above
        out.append(Check(name, 1.0 if ok else 0.0, 1.0, 0.0, ok,
                         {"critical": crit, "finite_below": below, "finite_above": above}))
    return out


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[Config], list[Check]]
    budget: float


CRITERIA = [
    Criterion(1, "lifespan closed forms at (2,2)", c01, 1.0),
    Criterion(2, "quarter-energy closed form", c02, 1.0),
    Criterion(3, "total lifespan at E=0", c03, 1.0),
    Criterion(4, "X_C and E_inf defining equations", c04, 5.0),
    Criterion(5, "threshold defining property", c05, 30.0),
    Criterion(6, "initial data norm identity", c06, 10.0),
    Criterion(7, "blow-up rates", c07, 60.0),
    Criterion(8, "blow-up profile", c08, 60.0),
    Criterion(9, "attractor", c09, 30.0),
    Criterion(10, "threshold growth", c10, 600.0),
    Criterion(11, "radiation", c11, 120.0),
    Criterion(12, "data regularity table", c12, 30.0),
]

SUITES = {
    "lifespan": [1, 2, 3, 4],
    "threshold": [5],
    "norms": [6, 12],
    "blowup-rates": [7],
    "blowup-profile": [8],
    "attractor": [9],
    "threshold-growth": [10],
    "radiation": [11],
    "all": list(range(1, 13)),
}


def run_criterion(number: int, cfg: Config = DEFAULT) -> CriterionResult:
    crit = CRITERIA[number - 1]
    t0 = time.perf_counter()
    checks = crit.run(cfg)
    return CriterionResult(crit.number, crit.title, checks, time.perf_counter() - t0, crit.budget)


def run_suite(name: str, cfg: Config = DEFAULT) -> list[CriterionResult]:
    try:
        numbers = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return [run_criterion(n, cfg) for n in numbers]
