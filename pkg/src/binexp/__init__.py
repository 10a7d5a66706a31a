"""Binary experiments: f-divergences, proper losses, information and bounds."""

from . import bounds, convex_core, curves, divergences, experiments, information, losses, variational
from .convex_core import INF, ConvexFunction
from .divergences import WeightFunction, builtin, f_divergence_direct
from .errors import (BinexpError, DivergenceError, DomainError, InfeasibleError, NumericError,
                     PreconditionError, ShapeError, ValidationError)
from .experiments import BinaryExperiment, Task, load_experiment
from .losses import ProperLoss, builtin_loss

__version__ = "0.1.0"

__all__ = [
    "bounds", "convex_core", "curves", "divergences", "experiments", "information",
    "losses", "variational",
    "INF", "ConvexFunction", "WeightFunction", "builtin", "f_divergence_direct",
    "BinaryExperiment", "Task", "load_experiment", "ProperLoss", "builtin_loss",
    "BinexpError", "DivergenceError", "DomainError", "InfeasibleError", "NumericError",
    "PreconditionError", "ShapeError", "ValidationError",
]
