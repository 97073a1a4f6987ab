"""Modified inflow conditions that remove the quadratic self-reflection terms.

The mode-4 boundary row gains

    lambda1 m1 (0, -xi_y, xi_x, 0, 0) + lambda2 m2 (0, -xi_z, 0, xi_x, 0)

and m1, m2 are chosen so that v4 . u5 has no lambda1^2 or lambda2^2 term.

Two coefficient forms are offered.  ``form="norms"`` uses |eta|^2 and
|zeta|^2 as the quadratic weights.  ``form="exact"`` uses the projected
weights |eta|^2 - |xi.eta|^2 / |xi|^2 (and the zeta analogue), which are
the true second-order coefficients of v4 . u5 on any metric.  The two
forms agree on grids orthogonal at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bc_quasi3d import BCOperator, assemble
from .dispersion import LambdaPair, s_star
from .eigenvectors import right_eigenvector
from .errors import DegenerateDenominator, InternalInconsistency
from .metrics import MeanFlow, Metric, compute_norms, contravariant
from .wellposedness import (Finding, _require_orthogonal, boundary_rows, critical_matrix_inflow,
                            detect_illposed_inflow, moving_frame)

FORMS = ("norms", "exact")
DENOM_TOL = 1e-10
AXIS_TOL = 1e-10
IDENTITY_TOL = 1e-14


@dataclass(frozen=True)
class ModCoefficients:
    m1: float
    m2: float
    A1: float
    A2: float
    A3: float
    form: str = "norms"
    path: str = "general"

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("m1", "m2", "A1", "A2", "A3", "form", "path")}


def _denominators(m: Metric):
    x, e, z = m.xi, m.eta, m.zeta
    den1 = x[1] * e[0] - x[0] * e[1]
    den2 = x[2] * z[0] - x[0] * z[2]
    cross1 = x[1] * z[0] - x[0] * z[1]
    cross2 = x[2] * e[0] - x[0] * e[2]
    return den1, den2, cross1, cross2


def quadratic_weights(m: Metric, form: str = "norms"):
    """(q_eta, q_zeta, q_cross) multiplying -(U + |xi|)/2 in the unmodified product."""
    n = compute_norms(m)
    if form == "norms":
        return n.norm_eta**2, n.norm_zeta**2, 0.0
    if form == "exact":
        nx2 = n.norm_xi**2
        return (n.norm_eta**2 - n.dot_xieta**2 / nx2,
                n.norm_zeta**2 - n.dot_xizeta**2 / nx2,
                2 * (n.dot_etazeta - n.dot_xieta * n.dot_xizeta / nx2))
    raise ValueError(f"form must be one of {FORMS}")


def _is_axis_aligned(m: Metric) -> bool:
    a = m.as_matrix()
    off = a - np.diag(np.diag(a))
    return bool(np.max(np.abs(off)) <= AXIS_TOL * np.max(np.abs(a)))


def reflection_coefficients(m: Metric, flow: MeanFlow, m1: float, m2: float, form: str = "norms"):
    """(A1, A2, A3) of v4 . u5 = (U - |xi|)/(2|xi|^2) (A1 l1^2 + A2 l1 l2 + A3 l2^2)."""
    U = contravariant(m, flow)[0]
    nx = compute_norms(m).norm_xi
    q1, q3, q2 = quadratic_weights(m, form)
    den1, den2, cross1, cross2 = _denominators(m)
    half = 0.5 * (U + nx)
    A1 = -half * q1 + m1 * den1
    A2 = -half * q2 + m1 * cross1 + m2 * cross2
    A3 = -half * q3 + m2 * den2
    return A1, A2, A3


def compute_m(m: Metric, flow: MeanFlow, form: str = "norms") -> ModCoefficients:
    """Nondimensional m1, m2 and the resulting reflection coefficients.

    Axis-aligned metrics take the limit form m = -(U + |xi|) eta_y / (2 xi_x)
    (and zeta_z for m2), which is -(u + 1)/2 on the unit Cartesian grid.
    """
    if flow.dimensional:
        flow = flow.nondimensionalized()
    U = contravariant(m, flow)[0]
    nx = compute_norms(m).norm_xi
    q1, q3, _ = quadratic_weights(m, form)
    den1, den2, _, _ = _denominators(m)
    half = 0.5 * (U + nx)
    if _is_axis_aligned(m):
        path = "limit"
        m1 = -half * m.eta_y / m.xi_x
        m2 = -half * m.zeta_z / m.xi_x
    else:
        path = "general"
        n = compute_norms(m)
        if abs(den1) <= DENOM_TOL * nx * n.norm_eta or abs(den2) <= DENOM_TOL * nx * n.norm_zeta:
            raise DegenerateDenominator("xi_y eta_x - xi_x eta_y or xi_z zeta_x - xi_x zeta_z vanishes")
        m1 = half * q1 / den1
        m2 = half * q3 / den2
    A1, A2, A3 = reflection_coefficients(m, flow, m1, m2, form)
    scale = max(1.0, half * max(q1, q3))
    if abs(A1) > IDENTITY_TOL * scale or abs(A3) > IDENTITY_TOL * scale:
        raise InternalInconsistency("A1 or A3 does not vanish for the computed m1, m2")
    return ModCoefficients(float(m1), float(m2), float(A1), float(A2), float(A3), form, path)


def modified_v4(m: Metric, flow: MeanFlow, lp: LambdaPair, coeffs: ModCoefficients | None = None) -> np.ndarray:
    coeffs = coeffs or compute_m(m, flow)
    return boundary_rows(m, flow, lp, (4,), coeffs.m1, coeffs.m2)[0]


def product_v4_u5(m: Metric, flow: MeanFlow, lp: LambdaPair, coeffs: ModCoefficients | None = None,
                  omega=1.0):
    """(v4 . u5 evaluated directly, its quadratic prediction from A1, A2, A3)."""
    coeffs = coeffs or compute_m(m, flow)
    direct = complex(modified_v4(m, flow, lp, coeffs) @ right_eigenvector(5, m, flow, lp, omega))
    U = contravariant(m, flow)[0]
    nx = compute_norms(m).norm_xi
    l1, l2 = complex(lp[0]), complex(lp[1])
    A1, A2, A3 = reflection_coefficients(m, flow, coeffs.m1, coeffs.m2, coeffs.form)
    predicted = (U - nx) / (2 * nx**2) * (A1 * l1**2 + A2 * l1 * l2 + A3 * l2**2)
    return direct, predicted


def build_modified(m: Metric, flow: MeanFlow, basis: str = "primitive", mode: str | None = None,
                   h44_reading: str = "derived", form: str = "norms") -> BCOperator:
    """Modified inflow operator; only row 4 differs from the quasi-3D one."""
    coeffs = compute_m(m, flow, form)
    op = assemble(m, flow, "inflow", basis, mode, h44_reading, coeffs.m1, coeffs.m2, variant="modified")
    op.meta.update(A2=coeffs.A2, form=form, path=coeffs.path)
    return op


def modified_critical_matrix(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0,
                             form: str = "norms", basis: str = "plain"):
    coeffs = compute_m(m, flow, form)
    return critical_matrix_inflow(m, flow, lp, omega, coeffs.m1, coeffs.m2, basis, check=False)


def check_locus(m: Metric, flow: MeanFlow, l: float, m_wn: float, form: str = "norms",
                basis: str = "jordan") -> Finding:
    """Rank of the modified inflow critical matrix at the unmodified ill-posed frequency.

    At that frequency u4 coalesces with u2, so the plain eigenvector basis
    is rank deficient for any boundary rows; the Jordan-completed basis
    is the meaningful one.
    """
    coeffs = compute_m(m, flow, form)
    return detect_illposed_inflow(m, flow, l, m_wn, coeffs.m1, coeffs.m2, basis)


def s_star_series(m: Metric, flow: MeanFlow, gamma: float) -> float:
    """S* ~ (|xi|/U) [1 + (U^2 - |xi|^2) Gamma / (2 |xi|^2)] for small Gamma."""
    U = contravariant(m, flow)[0]
    nx = compute_norms(m).norm_xi
    return nx / U * (1 + 0.5 * (U * U - nx * nx) / nx**2 * gamma)


def s_star_series_error(m: Metric, flow: MeanFlow, gammas) -> np.ndarray:
    """Relative error of the series against the full S*, divided by Gamma^2.

    Gamma = lambda1^2 |eta|^2 is realized with lambda2 = 0 and real lambda1
    in the V = W = 0 frame; the series assumes a grid orthogonal at the
    boundary.
    """
    _require_orthogonal(m)
    flow = moving_frame(flow, m)
    n = compute_norms(m)
    out = []
    for g in np.asarray(gammas, dtype=float):
        lp = LambdaPair(np.sqrt(g) / n.norm_eta, 0.0)
        exact = s_star(m, flow, lp).real
        out.append(abs(exact - s_star_series(m, flow, g)) / abs(exact) / g**2)
    return np.array(out)
