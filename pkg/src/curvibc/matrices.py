"""Cartesian and curvilinear flux matrices and the Fourier dispersion matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionalModeUnsupported, InternalInconsistency
from .metrics import MeanFlow, Metric, contravariant

CROSS_CHECK_TOL = 1e-14


class WaveVector(NamedTuple):
    """Wavenumbers along (xi, eta, zeta) and the frequency of a Fourier mode."""

    k: complex
    l: complex
    m: complex
    omega: complex


@dataclass(frozen=True)
class DispersionMatrix:
    matrix: np.ndarray
    beta: complex
    alpha1: complex
    alpha2: complex
    alpha3: complex

    @property
    def alpha(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2, self.alpha3])


def _flux(vel: float, direction: int) -> np.ndarray:
    """Nondimensional flux matrix for one Cartesian direction (0, 1, 2)."""
    a = vel * np.eye(5)
    a[0, 1 + direction] = 1.0
    a[1 + direction, 4] = 1.0
    a[4, 1 + direction] = 1.0
    return a


def build_cartesian(flow: MeanFlow):
    """Return (A_bar, B_bar, C_bar) of the nondimensional linearized equations."""
    if flow.dimensional:
        raise DimensionalModeUnsupported("Cartesian flux matrices assume rho_bar = c_bar = 1")
    return _flux(flow.u_bar, 0), _flux(flow.v_bar, 1), _flux(flow.w_bar, 2)


def _closed_form(row: np.ndarray, vel: float) -> np.ndarray:
    a = vel * np.eye(5)
    a[0, 1:4] = row
    a[1:4, 4] = row
    a[4, 1:4] = row
    return a


def build_curvilinear(m: Metric, flow: MeanFlow):
    """Return (A_tilde, B_tilde, C_tilde).

    The closed forms and the linear combinations of the Cartesian matrices
    are both built and compared; a mismatch signals a coding fault.
    """
    abar, bbar, cbar = build_cartesian(flow)
    contra = contravariant(m, flow)
    mat = m.as_matrix()
    out = []
    for row, vel in zip(mat, contra):
        combo = row[0] * abar + row[1] * bbar + row[2] * cbar
        closed = _closed_form(row, vel)
        scale = max(1.0, float(np.max(np.abs(closed))))
        if np.max(np.abs(combo - closed)) > CROSS_CHECK_TOL * scale:
            raise InternalInconsistency("curvilinear flux matrix constructions disagree")
        out.append(closed)
    return tuple(out)


def dispersion_matrix(m: Metric, flow: MeanFlow, wave: WaveVector) -> DispersionMatrix:
    at, bt, ct = build_curvilinear(m, flow)
    k, l, mw, omega = (complex(v) for v in wave)
    mat = -omega * np.eye(5, dtype=complex) + k * at + l * bt + mw * ct
    U, V, W = contravariant(m, flow)
    beta = U * k + V * l + W * mw - omega
    alpha = k * m.xi + l * m.eta + mw * m.zeta
    return DispersionMatrix(mat, beta, complex(alpha[0]), complex(alpha[1]), complex(alpha[2]))


def dispersion_determinant(d: DispersionMatrix) -> complex:
    """Factored determinant beta^3 (beta^2 - |alpha|^2); equals det(d.matrix)."""
    b = d.beta
    return b**3 * (b**2 - d.alpha1**2 - d.alpha2**2 - d.alpha3**2)
