"""Radial cubic wave equation: conformal ODE reduction, threshold curve and asymptotics."""

__version__ = "0.1.0"

from .config import DEFAULT, Config
from .duffing import LifespanError, ParameterError, PhasePoint, StepSizeUnderflow, energy
from .kernels import BACKEND
from .lifespan import (boundary_tplus, e_infinity, lifespan, quad_R, quad_S, t_minus, t_plus,
                       total_lifespan_by_energy, x_critical)
from .threshold import Behavior, beta, classify_bidirectional, classify_forward, phase_diagram

__all__ = [
    "BACKEND", "Behavior", "Config", "DEFAULT", "LifespanError", "ParameterError", "PhasePoint",
    "StepSizeUnderflow", "beta", "boundary_tplus", "classify_bidirectional", "classify_forward",
    "e_infinity", "energy", "lifespan", "phase_diagram", "quad_R", "quad_S", "t_minus", "t_plus",
    "total_lifespan_by_energy", "x_critical", "__version__",
]
