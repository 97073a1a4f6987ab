"""Quasi-3D boundary operators from the first-order Taylor expansion of v_n^L.

An operator is the triple (time_rows, G, H) of the residual

    time_rows @ Q_t + G @ Q_eta + H @ Q_zeta = 0,

with G = -dv/dlambda1 and H = -dv/dlambda2 evaluated at lambda = 0.
Inflow uses modes 1..4, outflow mode 5.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bc_first_order import build_transform, resolve_mode, scaling
from .eigenvectors import _psi, limit_vectors
from .errors import CriticalStreamwise, InternalInconsistency
from .metrics import MeanFlow, Metric, compute_norms, contravariant

SIDES = ("inflow", "outflow")
BASES = ("primitive", "characteristic")
H44_READINGS = ("derived", "xieta")
CROSS_CHECK_TOL = 1e-12

ROWS = {"inflow": (0, 1, 2, 3), "outflow": (4,)}


@dataclass(frozen=True)
class BCOperator:
    time_rows: np.ndarray
    G: np.ndarray
    H: np.ndarray
    side: str
    basis: str = "primitive"
    variant: str = "quasi3d"
    mode: str = "nondimensional"
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "basis": self.basis,
            "variant": self.variant,
            "mode": self.mode,
            "time_rows": self.time_rows.tolist(),
            "G": self.G.tolist(),
            "H": self.H.tolist(),
            "meta": self.meta,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def taylor_v_left(n: int, m: Metric, flow: MeanFlow):
    """(v_n^L(0,0), dv/dlambda1, dv/dlambda2) as real 5-vectors.

    The derivatives of k4*, k5* enter only through the last entry and are
    taken analytically: D dk*/dlambda = -dP +/- d(PS) with
    d(PS) = (U dP + D dmu) / |xi|.
    """
    norms = compute_norms(m)
    U, V, W = contravariant(m, flow)
    if U == 0:
        raise CriticalStreamwise("contravariant normal velocity U is zero")
    nx = norms.norm_xi
    xi, eta, zeta = m.xi, m.eta, m.zeta
    v0 = np.zeros(5)
    d1 = np.zeros(5)
    d2 = np.zeros(5)
    if n == 1:
        v0[0], v0[4] = -nx, nx
    elif n in (2, 3):
        _psi(m, n)
        j = 1 if n == 2 else 2  # y or z component paired with x
        slot = 2 if n == 2 else 3
        v0[1], v0[slot] = -xi[j], xi[0]
        for d, tang, vel in ((d1, eta, V), (d2, zeta, W)):
            d[1] = xi[j] * vel - U * tang[j]
            d[slot] = -xi[0] * vel + U * tang[0]
            d[4] = xi[j] * tang[0] - xi[0] * tang[j]
    elif n in (4, 5):
        sign = 1.0 if n == 4 else -1.0
        v0[1:4] = sign * xi
        v0[4] = nx
        D = nx**2 - U**2
        for d, tang, vel, dot in ((d1, eta, V, norms.dot_xieta), (d2, zeta, W, norms.dot_xizeta)):
            d[1:4] = sign * (U * tang - vel * xi)
            dP, dmu = dot - U * vel, -vel
            d[4] = (U * dP + D * dmu) / nx
    else:
        raise ValueError(f"mode index must be 1..5, got {n}")
    return v0, d1, d2


def _det2(a, b, i, j):
    return a[i] * b[j] - a[j] * b[i]


def primitive_tables(m: Metric, flow: MeanFlow):
    """Explicit nondimensional G, H (5x5) of the primitive-variable operator."""
    norms = compute_norms(m)
    U, V, W = contravariant(m, flow)
    nx = norms.norm_xi
    xi = m.xi
    out = []
    for tang, vel, dot in ((m.eta, V, norms.dot_xieta), (m.zeta, W, norms.dot_xizeta)):
        g = np.zeros((5, 5))
        g[1, 1] = U * tang[1] - vel * xi[1]
        g[1, 2] = -U * tang[0] + vel * xi[0]
        g[1, 4] = _det2(xi, tang, 0, 1)
        g[2, 1] = U * tang[2] - vel * xi[2]
        g[2, 3] = -U * tang[0] + vel * xi[0]
        g[2, 4] = _det2(xi, tang, 0, 2)
        g[3, 1:4] = -U * tang + vel * xi
        g[3, 4] = -U * dot / nx + vel * nx
        g[4, 1:4] = U * tang - vel * xi
        g[4, 4] = -U * dot / nx + vel * nx
        out.append(g)
    return out[0], out[1]


def characteristic_tables(m: Metric, flow: MeanFlow, h44_reading: str = "derived"):
    """Explicit characteristic-basis G, H (5x5), valid in both modes.

    Velocities are the dimensional contravariant ones and ``c`` is the mean
    sound speed; with rho = c = 1 these are the nondimensional tables.
    """
    if h44_reading not in H44_READINGS:
        raise ValueError(f"h44_reading must be one of {H44_READINGS}")
    norms = compute_norms(m)
    U, V, W = contravariant(m, flow)
    c = flow.c_bar
    nx = norms.norm_xi
    p2, p3 = _psi(m, 2), _psi(m, 3)
    xi = m.xi
    out = []
    for tang, vel, dot in ((m.eta, V, norms.dot_xieta), (m.zeta, W, norms.dot_xizeta)):
        g = np.zeros((5, 5))
        g[1, 1] = -U / p2**2 * (xi[1] * tang[1] + xi[0] * tang[0]) + vel
        g[1, 2] = -xi[2] / p3**2 * (U * tang[1] - vel * xi[1])
        g[1, 3] = (c * nx + U) / (2 * nx**2) * _det2(xi, tang, 0, 1)
        g[1, 4] = (c * nx - U) / (2 * nx**2) * _det2(xi, tang, 0, 1)
        g[2, 1] = -xi[1] / p2**2 * (U * tang[2] - vel * xi[2])
        g[2, 2] = -U / p3**2 * (xi[2] * tang[2] + xi[0] * tang[0]) + vel
        g[2, 3] = (c * nx + U) / (2 * nx**2) * _det2(xi, tang, 0, 2)
        g[2, 4] = (c * nx - U) / (2 * nx**2) * _det2(xi, tang, 0, 2)
        g[3, 1] = U / p2**2 * _det2(xi, tang, 1, 0)
        g[3, 2] = U / p3**2 * _det2(xi, tang, 2, 0)
        g[3, 3] = -U * dot / nx**2 + vel
        g[4, 1] = -g[3, 1]
        g[4, 2] = -g[3, 2]
        g[4, 4] = -U * dot / nx**2 + vel
        out.append(g)
    G, H = out
    if h44_reading == "xieta":
        # alternate reading: the eta cross term in place of the zeta one
        H[3, 3] = -U * norms.dot_xieta / nx**2 + W
    return G, H


def characteristic_time_rows(m: Metric) -> np.ndarray:
    """L R: identity except entry (2, 3) = xi_y xi_z / Psi3^2."""
    wR, wL = limit_vectors(m)
    return wL @ wR


def _taylor_tables(m: Metric, flow: MeanFlow):
    T = np.zeros((5, 5))
    G = np.zeros((5, 5))
    H = np.zeros((5, 5))
    for n in range(1, 6):
        v0, d1, d2 = taylor_v_left(n, m, flow)
        T[n - 1], G[n - 1], H[n - 1] = v0, -d1, -d2
    return T, G, H


def _check(a, b, what):
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - b)) > CROSS_CHECK_TOL * scale:
        raise InternalInconsistency(f"{what}: constructions disagree")


def modified_corrections(m: Metric, m1: float, m2: float):
    """Nondimensional primitive row-4 corrections (dG4, dH4) of the modified operator."""
    xi = m.xi
    dG = np.array([0.0, m1 * xi[1], -m1 * xi[0], 0.0, 0.0])
    dH = np.array([0.0, m2 * xi[2], 0.0, -m2 * xi[0], 0.0])
    return dG, dH


def assemble(m: Metric, flow: MeanFlow, side: str, basis: str = "primitive",
             mode: str | None = None, h44_reading: str = "derived",
             m1: float = 0.0, m2: float = 0.0, variant: str = "quasi3d") -> BCOperator:
    """Shared assembly for the quasi-3D and modified operators.

    ``m1`` and ``m2`` are the nondimensional modification coefficients;
    they only touch inflow row 4.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    mode = resolve_mode(flow, mode)
    nd = flow.nondimensionalized() if flow.dimensional else flow

    T, G, H = _taylor_tables(m, nd)
    Gt, Ht = primitive_tables(m, nd)
    _check(G, Gt, "primitive G")
    _check(H, Ht, "primitive H")
    if m1 or m2:
        dG, dH = modified_corrections(m, m1, m2)
        G[3] += dG
        H[3] += dH

    wR, _ = limit_vectors(m)
    rows = list(ROWS[side])
    c = flow.c_bar if mode == "dimensional" else 1.0
    if basis == "characteristic":
        Tc, Gc, Hc = T @ wR, c * G @ wR, c * H @ wR
        Ge, He = characteristic_tables(m, flow if mode == "dimensional" else nd, "derived")
        if m1 or m2:
            p2, p3 = _psi(m, 2), _psi(m, 3)
            x = m.xi
            Ge[3, 1] -= c * m1
            Ge[3, 2] -= c * m1 * x[1] * x[2] / p3**2
            He[3, 1] -= c * m2 * x[1] * x[2] / p2**2
            He[3, 2] -= c * m2
        _check(Gc, Ge, "characteristic G")
        _check(Hc, He, "characteristic H")
        _check(Tc, characteristic_time_rows(m), "characteristic time rows")
        if h44_reading != "derived":
            Hp = characteristic_tables(m, flow if mode == "dimensional" else nd, h44_reading)[1]
            Hc[3, 3] = Hp[3, 3]
        T, G, H = Tc, Gc, Hc
    elif mode == "dimensional":
        S_inv = np.linalg.inv(scaling(flow))
        rc2 = flow.rho_bar * flow.c_bar**2
        T, G, H = rc2 * T @ S_inv, rc2 * c * G @ S_inv, rc2 * c * H @ S_inv
    meta = {"h44_reading": h44_reading} if basis == "characteristic" else {}
    if m1 or m2:
        meta.update(m1=float(m1 * c), m2=float(m2 * c))
    return BCOperator(T[rows].copy(), G[rows].copy(), H[rows].copy(), side, basis, variant, mode, meta)


def build_quasi3d(m: Metric, flow: MeanFlow, side: str, basis: str = "primitive",
                  mode: str | None = None, h44_reading: str = "derived") -> BCOperator:
    """Quasi-3D operator for one face.

    The primitive tables are built from the Taylor coefficients and from the
    explicit coefficient tables, and the characteristic tables from G R and
    from their explicit forms; any mismatch raises InternalInconsistency.
    """
    return assemble(m, flow, side, basis, mode, h44_reading)


def bc_residual(op: BCOperator, qt, q_eta, q_zeta) -> np.ndarray:
    return op.time_rows @ np.asarray(qt) + op.G @ np.asarray(q_eta) + op.H @ np.asarray(q_zeta)


def first_order_operator(m: Metric, flow: MeanFlow, side: str, mode: str | None = None) -> BCOperator:
    """The one-dimensional operator written in the same (time, G, H) form."""
    t = build_transform(m, flow, mode)
    rows = list(ROWS[side])
    T = t.to_char[rows]
    z = np.zeros_like(T)
    return BCOperator(T, z, z.copy(), side, "primitive", "first_order", t.mode)
