"""Linearized Euler solver used to measure boundary reflections."""
from .config import SimConfig, from_dict, load, validate
from .reflection import Reflection, measure_reflection, run_experiment, run_reference
from .solver import FieldState, RunResult, Simulation, energy, face_closure

__all__ = [
    "FieldState", "Reflection", "RunResult", "SimConfig", "Simulation", "energy", "face_closure",
    "from_dict", "load", "measure_reflection", "run_experiment", "run_reference", "validate",
]
