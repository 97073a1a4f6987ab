"""One-dimensional characteristic transforms and first-order inflow/outflow conditions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .eigenvectors import limit_vectors
from .errors import DimensionalModeUnsupported
from .metrics import MeanFlow, Metric

MODES = ("nondimensional", "dimensional")
RECONSTRUCTIONS = ("modal", "exact")

INFLOW_ZEROED = (0, 1, 2, 3)
OUTFLOW_ZEROED = (4,)


class Perturbation(NamedTuple):
    rho_p: float
    u_p: float
    v_p: float
    w_p: float
    p_p: float


class CharacteristicState(NamedTuple):
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float


@dataclass(frozen=True)
class CharTransform:
    """Primitive <-> characteristic maps at one boundary point.

    ``reconstruction="modal"`` uses the modal matrix whose columns are the
    one-dimensional right eigenvectors.  It is the exact inverse of
    ``to_char`` only when xi_y * xi_z = 0.  ``reconstruction="exact"`` uses
    the numerical inverse instead.
    """

    to_char: np.ndarray
    from_char: np.ndarray
    mode: str = "nondimensional"
    reconstruction: str = "modal"


def scaling(flow: MeanFlow) -> np.ndarray:
    """diag(rho, c, c, c, rho c^2): primitive variables per nondimensional unit."""
    r, c = flow.rho_bar, flow.c_bar
    return np.diag([r, c, c, c, r * c * c])


def resolve_mode(flow: MeanFlow, mode: str | None) -> str:
    if mode is None:
        return "dimensional" if flow.dimensional else "nondimensional"
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "nondimensional" and flow.dimensional and (flow.rho_bar != 1 or flow.c_bar != 1):
        raise DimensionalModeUnsupported("dimensional flow needs mode='dimensional'")
    return mode


def build_transform(m: Metric, flow: MeanFlow | None = None, mode: str | None = None,
                    reconstruction: str = "modal") -> CharTransform:
    if reconstruction not in RECONSTRUCTIONS:
        raise ValueError(f"reconstruction must be one of {RECONSTRUCTIONS}")
    flow = flow if flow is not None else MeanFlow()
    mode = resolve_mode(flow, mode)
    wR, wL = limit_vectors(m)
    if mode == "dimensional":
        S = scaling(flow)
        rc2 = flow.rho_bar * flow.c_bar**2
        to_char = rc2 * wL @ np.linalg.inv(S)
        from_char = S @ wR / rc2
    else:
        to_char, from_char = wL, wR
    if reconstruction == "exact":
        from_char = np.linalg.inv(to_char)
    return CharTransform(to_char, from_char, mode, reconstruction)


def to_characteristics(t: CharTransform, q) -> CharacteristicState:
    return CharacteristicState(*(t.to_char @ np.asarray(q, dtype=float)))


def from_characteristics(t: CharTransform, c) -> Perturbation:
    return Perturbation(*(t.from_char @ np.asarray(c, dtype=float)))


def _project(t: CharTransform, q, zeroed) -> Perturbation:
    c = t.to_char @ np.asarray(q, dtype=float)
    c[list(zeroed)] = 0.0
    return Perturbation(*(t.from_char @ c))


def apply_inflow_1d(t: CharTransform, q) -> Perturbation:
    """Zero the four incoming amplitudes c1..c4 and reconstruct."""
    return _project(t, q, INFLOW_ZEROED)


def apply_outflow_1d(t: CharTransform, q) -> Perturbation:
    """Zero the incoming amplitude c5 and reconstruct."""
    return _project(t, q, OUTFLOW_ZEROED)


def inverse_deviation(t: CharTransform) -> float:
    """max |from_char @ to_char - I|; zero for exact inverses."""
    return float(np.max(np.abs(t.from_char @ t.to_char - np.eye(5))))
