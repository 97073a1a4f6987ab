"""Nonreflecting inflow/outflow boundary conditions for the linearized Euler
equations in generalized curvilinear coordinates."""
from .dispersion import LambdaPair, roots_k
from .errors import CurvibcError
from .metrics import MeanFlow, Metric, compute_norms, contravariant

__version__ = "0.1.0"

__all__ = ["CurvibcError", "LambdaPair", "MeanFlow", "Metric", "compute_norms", "contravariant", "roots_k"]
