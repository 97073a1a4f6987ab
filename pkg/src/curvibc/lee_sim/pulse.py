"""Initial conditions: acoustic, vorticity and entropy pulses on the index grid."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..errors import ConfigError
from ..metrics import MetricField

LN2 = math.log(2.0)


def envelope(xi, center: float, width: float) -> np.ndarray:
    """Gaussian in xi with half width at half maximum ``width``."""
    return np.exp(-LN2 * ((np.asarray(xi) - center) / width) ** 2)


def physical_wavevector(mat: np.ndarray, k_xi: float, k_eta: float) -> np.ndarray:
    """k_xi grad(xi) + k_eta grad(eta) for a 3x3 metric matrix."""
    return k_xi * mat[0] + k_eta * mat[1]


def incidence_angle(mat: np.ndarray, k_xi: float, k_eta: float) -> float:
    """Angle in degrees between the physical wavevector and grad(xi)."""
    k = physical_wavevector(mat, k_xi, k_eta)
    c = k @ mat[0] / (np.linalg.norm(k) * np.linalg.norm(mat[0]))
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


def solve_k_xi(mat: np.ndarray, k_eta: float, angle_deg: float) -> float:
    """Index-space k_xi >= 0 giving the requested incidence angle for a fixed k_eta."""
    if k_eta == 0.0:
        if angle_deg != 0.0:
            raise ConfigError("an oblique pulse needs a nonzero eta wavenumber")
        return 0.0
    if angle_deg == 0.0:
        raise ConfigError("normal incidence needs pulse.eta_modes = 0")

    def f(kx):
        return incidence_angle(mat, kx, k_eta) - angle_deg

    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise ConfigError("incidence angle not reachable on this metric")
    lo = -hi
    while f(lo) < 0:
        lo *= 2.0
        if lo < -1e6:
            raise ConfigError("incidence angle not reachable on this metric")
    # the angle decreases monotonically in k_xi
    return float(brentq(f, lo, hi, xtol=1e-14))


def initial_field(spec, field: MetricField, velocity, xi_offset: float = 0.0,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Pulse field q (5, ni, nj, nk) in nondimensional primitive variables.

    ``spec`` is a :class:`PulseSpec`.  The carrier is cos(k_xi xi + k_eta eta)
    with k_eta = 2 pi eta_modes / nj and k_xi set by the incidence angle at the
    pulse center.  ``xi_offset`` shifts the index origin (used by extended
    reference grids).
    """
    comp = field.components
    ni, nj, nk = comp.shape[2:]
    i = np.arange(ni, dtype=float)[:, None, None] + xi_offset
    j = np.arange(nj, dtype=float)[None, :, None]
    ic = int(min(max(round(spec.center - xi_offset), 0), ni - 1))
    mat_c = comp[:, :, ic, 0, 0]
    k_eta = 2 * math.pi * spec.eta_modes / nj
    # the vorticity pulse varies along eta only; the angle applies to the other two
    k_xi = 0.0 if spec.type == "vorticity" else solve_k_xi(mat_c, k_eta, spec.angle_deg)
    amp = spec.amplitude * envelope(i, spec.center, spec.width)
    shape = (ni, nj, nk)
    q = np.zeros((5,) + shape)
    if spec.type == "entropy":
        q[0] = np.broadcast_to(amp * np.cos(k_xi * i + k_eta * j), shape)
    elif spec.type == "vorticity":
        # velocity along grad(xi) x grad(eta): no divergence, no pressure
        t = np.cross(comp[0], comp[1], axis=0)
        t = t / np.linalg.norm(t, axis=0)
        q[1:4] = t * (amp * np.cos(k_eta * j))
    else:
        p = np.broadcast_to(amp * np.cos(k_xi * i + k_eta * j), shape)
        q[0] = p
        q[4] = p
        if spec.direction != "both":
            k = k_xi * comp[0] + k_eta * comp[1]
            if k_xi == 0.0 and k_eta == 0.0:
                k = comp[0]
            khat = k / np.linalg.norm(k, axis=0)
            sign = 1.0 if spec.direction == "downstream" else -1.0
            q[1:4] = sign * khat * p
    if spec.noise:
        rng = rng if rng is not None else np.random.default_rng()
        q += spec.noise * spec.amplitude * rng.standard_normal(q.shape)
    return q
