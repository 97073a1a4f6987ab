"""Normal-mode well-posedness analysis of the inflow and outflow operators.

Everything here works in the frame moving with the tangential mean flow
(V = W = 0), where the boundary vectors are the first-order Taylor rows
v_n = v_n(0) + lambda1 dv_n/dlambda1 + lambda2 dv_n/dlambda2.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .bc_quasi3d import taylor_v_left
from .dispersion import LambdaPair, k_star
from .eigenvectors import _psi, right_eigenvector
from .errors import InternalInconsistency, NonOrthogonalGrid
from .metrics import MeanFlow, Metric, compute_norms, contravariant, is_orthogonal

RANK_TOL = 1e-8
CLOSED_FORM_TOL = 1e-12
FRAME_TOL = 1e-12
JORDAN_STEP = 1e-5


@dataclass(frozen=True)
class CriticalMatrix:
    entries: np.ndarray
    metric: Metric
    flow: MeanFlow
    lp: LambdaPair
    omega: complex = 1.0
    basis: str = "plain"

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def rank(self, tol: float = RANK_TOL) -> int:
        return numeric_rank(self.entries, tol)


@dataclass
class Finding:
    illposed: bool
    omega: complex | None = None
    lp: LambdaPair | None = None
    rank: int | None = None
    k3_star: complex | None = None
    k4_star: complex | None = None
    gamma_sum: complex | None = None
    message: str = "none"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def cx(z):
            return None if z is None else [float(complex(z).real), float(complex(z).imag)]
        return {
            "illposed": self.illposed,
            "omega": cx(self.omega),
            "lambda": None if self.lp is None else [cx(self.lp[0]), cx(self.lp[1])],
            "rank": self.rank,
            "k3_star": cx(self.k3_star),
            "k4_star": cx(self.k4_star),
            "gamma_sum": cx(self.gamma_sum),
            "message": self.message,
            **self.extra,
        }


def numeric_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def moving_frame(flow: MeanFlow, m: Metric | None = None) -> MeanFlow:
    """Mean flow with the same U and V = W = 0.

    The Cartesian velocity is M^-1 (U, 0, 0) with M the metric matrix, so
    the frame change needs the metric; without one it is taken Cartesian.
    """
    m = m if m is not None else Metric.cartesian()
    U, _, _ = contravariant(m, flow)
    vel = np.linalg.solve(m.as_matrix(), np.array([U, 0.0, 0.0]))
    return flow.with_velocity(vel)


def _require_frame(m: Metric, flow: MeanFlow):
    U, V, W = contravariant(m, flow)
    if abs(V) > FRAME_TOL * max(1.0, abs(U)) or abs(W) > FRAME_TOL * max(1.0, abs(U)):
        raise ValueError("critical matrices need the V = W = 0 frame; use moving_frame")
    return U


def _require_orthogonal(m: Metric):
    if not is_orthogonal(m):
        raise NonOrthogonalGrid("analysis requires an orthogonal grid at the boundary")


def gammas(m: Metric, flow: MeanFlow, lp: LambdaPair) -> np.ndarray:
    """gamma_i = xi_i + U (lambda1 eta_i + lambda2 zeta_i)."""
    U = contravariant(m, flow)[0]
    return m.xi + U * (complex(lp[0]) * m.eta + complex(lp[1]) * m.zeta)


def boundary_rows(m: Metric, flow: MeanFlow, lp: LambdaPair, modes=(1, 2, 3, 4),
                  m1: float = 0.0, m2: float = 0.0) -> np.ndarray:
    """Truncated v-rows for the given modes; m1, m2 modify the mode-4 row."""
    l1, l2 = complex(lp[0]), complex(lp[1])
    rows = []
    for n in modes:
        v0, d1, d2 = taylor_v_left(n, m, flow)
        v = v0 + l1 * d1 + l2 * d2
        if n == 4 and (m1 or m2):
            xi = m.xi
            v = v + l1 * m1 * np.array([0, -xi[1], xi[0], 0, 0]) + l2 * m2 * np.array([0, -xi[2], 0, xi[0], 0])
        rows.append(v)
    return np.array(rows)


def _right_columns(m, flow, lp, omega, modes):
    return np.array([right_eigenvector(n, m, flow, lp, omega) for n in modes]).T


def _jordan_column(m, flow, lp, omega, h=JORDAN_STEP):
    """Generalized incoming vector where u4 coalesces with u2.

    Along omega(1 + d) at fixed (l, m), u4 - s u2 vanishes at d = 0 with
    s = u4 / u2 there; its d-derivative is the boundary value of the
    limiting solution (xi u + w) exp(i k xi) that completes the basis.
    """
    u2 = right_eigenvector(2, m, flow, lp, omega)
    u4 = right_eigenvector(4, m, flow, lp, omega)
    j = int(np.argmax(np.abs(u2)))
    s = u4[j] / u2[j]

    def branch(d):
        o = omega * (1 + d)
        lpd = LambdaPair(lp[0] / (1 + d), lp[1] / (1 + d))
        return right_eigenvector(4, m, flow, lpd, o) - s * right_eigenvector(2, m, flow, lpd, o)

    return (branch(h) - branch(-h)) / (2 * h)


def is_coalesced(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0, tol: float = 1e-9) -> bool:
    u2 = right_eigenvector(2, m, flow, lp, omega)
    u4 = right_eigenvector(4, m, flow, lp, omega)
    a = np.column_stack([u2, u4])
    s = np.linalg.svd(a, compute_uv=False)
    return bool(s[-1] <= tol * s[0])


def closed_form_inflow(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> np.ndarray:
    """The entries of the 4x4 inflow critical matrix in closed form."""
    U = contravariant(m, flow)[0]
    norms = compute_norms(m)
    nx = norms.norm_xi
    p2, p3 = _psi(m, 2), _psi(m, 3)
    l1, l2 = complex(lp[0]), complex(lp[1])
    g = gammas(m, flow, lp)
    k4 = k_star(4, m, flow, lp, omega)
    tail = l1 * norms.dot_xieta + l2 * norms.dot_xizeta
    L5 = nx + U * tail / nx
    bracket = (k4 * nx**2 + U * (l1**2 * norms.norm_eta**2 + l2**2 * norms.norm_zeta**2
                                  + 2 * l1 * l2 * norms.dot_etazeta)
               + tail + k4 * U * (tail - L5) + L5)
    c = np.zeros((4, 4), dtype=complex)
    c[0, 0] = 1.0
    c[1, 1] = (g[1] ** 2 + g[0] ** 2) / p2**2
    c[1, 2] = g[1] * g[2] / p3**2
    c[2, 1] = g[1] * g[2] / p2**2
    c[2, 2] = (g[2] ** 2 + g[0] ** 2) / p3**2
    c[3, 3] = (U + nx) / (2 * nx**2) * bracket
    return c


def critical_matrix_inflow(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0,
                           m1: float = 0.0, m2: float = 0.0, basis: str = "plain",
                           check: bool = True) -> CriticalMatrix:
    """c_nj = v_n . u_j for the four incoming modes at an inflow face.

    ``basis="jordan"`` replaces u4 by the generalized vector when u4 and u2
    coalesce, which is the only way to span the incoming solutions there.
    Unmodified matrices are cross-checked against the closed form.
    """
    _require_frame(m, flow)
    rows = boundary_rows(m, flow, lp, (1, 2, 3, 4), m1, m2)
    cols = _right_columns(m, flow, lp, omega, (1, 2, 3, 4))
    if basis == "jordan":
        cols[:, 3] = _jordan_column(m, flow, lp, omega)
    elif basis != "plain":
        raise ValueError("basis must be 'plain' or 'jordan'")
    c = rows @ cols
    if check and basis == "plain" and not (m1 or m2):
        ref = closed_form_inflow(m, flow, lp, omega)
        scale = max(1.0, float(np.max(np.abs(ref))))
        if np.max(np.abs(c - ref)) > CLOSED_FORM_TOL * scale:
            raise InternalInconsistency("inflow critical matrix closed form disagrees")
    return CriticalMatrix(c, m, flow, lp, complex(omega), basis)


def outflow_scalar(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> complex:
    """v_5 . u_5 at an outflow face, normalized to 1 in the 1D limit."""
    _require_frame(m, flow)
    v = boundary_rows(m, flow, lp, (5,))[0]
    direct = complex(v @ right_eigenvector(5, m, flow, lp, omega))
    U = contravariant(m, flow)[0]
    norms = compute_norms(m)
    nx = norms.norm_xi
    l1, l2 = complex(lp[0]), complex(lp[1])
    k5 = k_star(5, m, flow, lp, omega)
    tail = l1 * norms.dot_xieta + l2 * norms.dot_xizeta
    L5 = nx + U * tail / nx
    bracket = (k5 * nx**2 + U * (l1**2 * norms.norm_eta**2 + l2**2 * norms.norm_zeta**2
                                  + 2 * l1 * l2 * norms.dot_etazeta)
               + tail + k5 * U * (tail + L5) - L5)
    closed = (U - nx) / (2 * nx**2) * bracket
    if abs(direct - closed) > CLOSED_FORM_TOL * max(1.0, abs(closed)):
        raise InternalInconsistency("outflow critical scalar closed form disagrees")
    return direct


def illposed_frequency(m: Metric, flow: MeanFlow, l: float, m_wn: float) -> complex:
    """omega = +i U sqrt(l^2 |eta|^2 + m^2 |zeta|^2) / |xi| (orthogonal grids)."""
    norms = compute_norms(m)
    U = contravariant(m, flow)[0]
    return 1j * U * abs(cmath.sqrt(l * l * norms.norm_eta**2 + m_wn * m_wn * norms.norm_zeta**2)) / norms.norm_xi


def detect_illposed_inflow(m: Metric, flow: MeanFlow, l: float, m_wn: float,
                           m1: float = 0.0, m2: float = 0.0, basis: str = "plain") -> Finding:
    _require_orthogonal(m)
    flow = moving_frame(flow, m)
    omega = illposed_frequency(m, flow, l, m_wn)
    if omega == 0:
        return Finding(False, omega=0j, message="none: l = m = 0 reduces to the 1D conditions")
    lp = LambdaPair(l / omega, m_wn / omega)
    cm = critical_matrix_inflow(m, flow, lp, omega, m1, m2, basis)
    rank = cm.rank()
    g = gammas(m, flow, lp)
    k3 = k_star(3, m, flow, lp, omega)
    k4 = k_star(4, m, flow, lp, omega)
    ill = rank < 4
    msg = ("ill-posed with two ill-posed modes" if rank == 2 else
           f"ill-posed, rank {rank}" if ill else "well-posed at this frequency")
    return Finding(ill, omega, lp, rank, k3, k4, complex(np.sum(g * g)), msg,
                   {"det": [float(cm.det.real), float(cm.det.imag)], "basis": basis})


def determinant_scan(m: Metric, flow: MeanFlow, l: float, m_wn: float, center: complex,
                     half_width: float = 0.1, n: int = 50, m1: float = 0.0, m2: float = 0.0):
    """|det C| on an n x n grid of complex frequencies around ``center``.

    Works for any metric; it is a numeric scanner with no verdict.
    Returns (re_axis, im_axis, |det|) with |det| indexed [im, re].
    """
    flow = moving_frame(flow, m)
    re = center.real + np.linspace(-half_width, half_width, n) * max(1.0, abs(center))
    im = center.imag + np.linspace(-half_width, half_width, n) * max(1.0, abs(center))
    out = np.empty((n, n))
    for a, y in enumerate(im):
        for b, x in enumerate(re):
            w = complex(x, y)
            lp = LambdaPair(l / w, m_wn / w)
            c = critical_matrix_inflow(m, flow, lp, w, m1, m2, check=False)
            out[a, b] = abs(c.det)
    return re, im, out


def outflow_wellposed_check(m: Metric, flow: MeanFlow, n: int = 50, extent: float = 2.0,
                            threshold: float = 0.01) -> dict:
    """Sweep (l, m) over [-extent, extent]^2 on the candidate ill-posed locus.

    The scalar equals 1 in the 1D limit, which sets the natural scale.
    """
    _require_orthogonal(m)
    flow = moving_frame(flow, m)
    axis = np.linspace(-extent, extent, n)
    best = np.inf
    arg = None
    for l in axis:
        for mw in axis:
            omega = illposed_frequency(m, flow, l, mw)
            if omega == 0:
                continue
            s = abs(outflow_scalar(m, flow, LambdaPair(l / omega, mw / omega), omega))
            if s < best:
                best, arg = s, (float(l), float(mw))
    return {"min_abs_scalar": float(best), "at": arg, "scale": 1.0,
            "wellposed": bool(best > threshold), "samples": n * n}
