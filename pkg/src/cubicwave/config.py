"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    """Tolerances and cutoffs.

    ``ode_tol`` is the relative accuracy requested from state queries; the
    integrator itself runs at ``ode_tol * ode_headroom``.
    """

    ode_tol: float = 1e-10
    energy_tol: float = 1e-8
    blowup_cutoff: float = 1e8
    ode_headroom: float = 1e-3
    max_steps: int = 2_000_000
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    tail_cut: float = 10.0
    threshold_band: float = 1e-9
    beta_bracket_limit: float = 1e6
    domain_guard: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("ode_tol", "energy_tol", "rel_tol", "abs_tol", "threshold_band"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def scaled(self, factor: float) -> "Config":
        """Multiply every tolerance by ``factor``; cutoffs are unchanged."""
        if not factor > 0:
            raise ValueError("tolerance scale must be positive")
        return replace(
            self,
            ode_tol=self.ode_tol * factor,
            energy_tol=self.energy_tol * factor,
            rel_tol=self.rel_tol * factor,
            abs_tol=self.abs_tol * factor,
        )


DEFAULT = Config()
