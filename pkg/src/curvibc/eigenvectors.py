"""Right, left and v-left eigenvector families in lambda form, and their limits.

All vectors are returned as complex numpy arrays of length 5 in the
primitive ordering (rho, u, v, w, p).  Left vectors are rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import KINDS, LambdaPair, k_star
from .errors import DegenerateNormalization, DimensionalModeUnsupported, InternalInconsistency
from .matrices import build_curvilinear
from .metrics import MeanFlow, Metric, compute_norms, contravariant

CROSS_CHECK_TOL = 1e-13
_PSI_TOL = 1e-12


@dataclass(frozen=True)
class Mode:
    index: int
    kind: str
    k_star: complex
    right: np.ndarray
    left: np.ndarray
    v_left: np.ndarray


def _require_nondimensional(flow: MeanFlow) -> None:
    if flow.dimensional and (flow.rho_bar != 1.0 or flow.c_bar != 1.0):
        raise DimensionalModeUnsupported(
            "eigenvector families are nondimensional; pass flow.nondimensionalized()"
        )


def _psi(m: Metric, n: int) -> float:
    norms = compute_norms(m)
    psi = norms.psi2 if n == 2 else norms.psi3
    if psi <= _PSI_TOL * norms.norm_xi:
        raise DegenerateNormalization(f"Psi{n} vanishes for this metric")
    return psi


def _parts(m: Metric, flow: MeanFlow, lp: LambdaPair):
    _require_nondimensional(flow)
    U, V, W = contravariant(m, flow)
    l1, l2 = complex(lp[0]), complex(lp[1])
    mu = 1.0 - V * l1 - W * l2
    tang = l1 * m.eta + l2 * m.zeta
    # A_i = xi_i mu* + U (eta_i l1 + zeta_i l2): the vorticity-family entries
    A = m.xi * mu + U * tang
    return U, V, W, l1, l2, mu, tang, A


def right_eigenvector(n: int, m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> np.ndarray:
    U, V, W, l1, l2, mu, tang, A = _parts(m, flow, lp)
    nx = compute_norms(m).norm_xi
    r = np.zeros(5, dtype=complex)
    if n == 1:
        r[0] = -1.0 / nx
    elif n == 2:
        r[1], r[2] = -A[1], A[0]
        r /= _psi(m, 2) ** 2
    elif n == 3:
        r[1], r[3] = -A[2], A[0]
        r /= _psi(m, 3) ** 2
    elif n in (4, 5):
        k = k_star(n, m, flow, lp, omega)
        a = m.xi * k + tang
        s = mu - U * k
        if n == 4:
            r[:] = (U + nx) / (2 * nx**2) * np.array([s, *a, s])
        else:
            r[:] = (U - nx) / (2 * nx**2) * np.array([-s, *(-a), -s])
    else:
        raise ValueError(f"mode index must be 1..5, got {n}")
    return r


def left_eigenvector(n: int, m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> np.ndarray:
    U, V, W, l1, l2, mu, tang, A = _parts(m, flow, lp)
    nx = compute_norms(m).norm_xi
    r = np.zeros(5, dtype=complex)
    if n == 1:
        r[0], r[4] = -nx, nx
    elif n == 2:
        _psi(m, 2)
        r[1], r[2] = -A[1], A[0]
    elif n == 3:
        _psi(m, 3)
        r[1], r[3] = -A[2], A[0]
    elif n in (4, 5):
        k = k_star(n, m, flow, lp, omega)
        a = m.xi * k + tang
        s = mu - U * k
        if n == 4:
            r[1:4], r[4] = (U + nx) * a, (U + nx) * s
        else:
            r[1:4], r[4] = -(U - nx) * a, -(U - nx) * s
    else:
        raise ValueError(f"mode index must be 1..5, got {n}")
    return r


def limit_k_star(n: int, m: Metric, flow: MeanFlow) -> float:
    """lim k*_n as lambda -> 0."""
    U = contravariant(m, flow)[0]
    nx = compute_norms(m).norm_xi
    return {1: 1 / U, 2: 1 / U, 3: 1 / U, 4: 1 / (U + nx), 5: 1 / (U - nx)}[n]


def _v_left_closed(n, m, flow, lp, omega):
    U, V, W, l1, l2, mu, tang, A = _parts(m, flow, lp)
    norms = compute_norms(m)
    nx = norms.norm_xi
    r = np.zeros(5, dtype=complex)
    if n == 1:
        r[0], r[4] = -nx, nx
    elif n == 2:
        r[1], r[2] = -A[1], A[0]
        r[4] = m.xi_y * tang[0] - m.xi_x * tang[1]
    elif n == 3:
        r[1], r[3] = -A[2], A[0]
        r[4] = m.xi_z * tang[0] - m.xi_x * tang[2]
    else:
        k = k_star(n, m, flow, lp, omega)
        D = nx**2 - U**2
        tail = U + k * D + l1 * (norms.dot_xieta - U * V) + l2 * (norms.dot_xizeta - U * W)
        sign = 1.0 if n == 4 else -1.0
        r[1:4] = sign * A
        r[4] = sign * tail
    return r


def v_left(n: int, m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> np.ndarray:
    """v_n^L = (lim k*_n) u_n^L A~, built in closed form and cross-checked."""
    if n not in range(1, 6):
        raise ValueError(f"mode index must be 1..5, got {n}")
    closed = _v_left_closed(n, m, flow, lp, omega)
    at, _, _ = build_curvilinear(m, flow)
    product = limit_k_star(n, m, flow) * (left_eigenvector(n, m, flow, lp, omega) @ at)
    scale = max(1.0, float(np.max(np.abs(product))))
    if np.max(np.abs(closed - product)) > CROSS_CHECK_TOL * scale:
        raise InternalInconsistency(f"v_left closed form disagrees with product for mode {n}")
    return closed


def mode(n: int, m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> Mode:
    return Mode(
        index=n,
        kind=KINDS[n - 1],
        k_star=k_star(n, m, flow, lp, omega),
        right=right_eigenvector(n, m, flow, lp, omega),
        left=left_eigenvector(n, m, flow, lp, omega),
        v_left=v_left(n, m, flow, lp, omega),
    )


def limit_vectors(m: Metric, flow: MeanFlow | None = None):
    """One-dimensional limits (w_R, w_L), each a 5x5 real array.

    Row n-1 of ``w_L`` is w_n^L; column n-1 of ``w_R`` is w_n^R.
    The limits are independent of the mean flow.
    """
    norms = compute_norms(m)
    nx = norms.norm_xi
    p2, p3 = _psi(m, 2), _psi(m, 3)
    xx, xy, xz = m.xi_x, m.xi_y, m.xi_z
    wL = np.array([
        [-nx, 0.0, 0.0, 0.0, nx],
        [0.0, -xy, xx, 0.0, 0.0],
        [0.0, -xz, 0.0, xx, 0.0],
        [0.0, xx, xy, xz, nx],
        [0.0, -xx, -xy, -xz, nx],
    ])
    wR = np.array([
        [-1.0 / nx, 0.0, 0.0, 1.0 / (2 * nx), 1.0 / (2 * nx)],
        [0.0, -xy / p2**2, -xz / p3**2, xx / (2 * nx**2), -xx / (2 * nx**2)],
        [0.0, xx / p2**2, 0.0, xy / (2 * nx**2), -xy / (2 * nx**2)],
        [0.0, 0.0, xx / p3**2, xz / (2 * nx**2), -xz / (2 * nx**2)],
        [0.0, 0.0, 0.0, 1.0 / (2 * nx), 1.0 / (2 * nx)],
    ])
    return wR, wL
