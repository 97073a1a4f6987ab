"""Invariant suites behind ``curvibc verify``.

Every suite returns a list of :class:`Check` records, one per measured
quantity, each with its tolerance and verdict.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from . import sampling
from .bc_first_order import build_transform
from .bc_modified import compute_m, check_locus, reflection_coefficients
from .bc_quasi3d import bc_residual, build_quasi3d, taylor_v_left
from .dispersion import LambdaPair, k_star, roots_k
from .eigenvectors import left_eigenvector, limit_vectors, right_eigenvector, v_left
from .matrices import WaveVector, build_curvilinear, dispersion_determinant, dispersion_matrix
from .metrics import MeanFlow, Metric, compute_norms, contravariant
from .wellposedness import detect_illposed_inflow, outflow_wellposed_check

SUITES = ("eigen", "dispersion", "transform", "quasi3d", "wellposed", "modified")

TOLERANCES = {
    "k_roots": 1e-9,
    "determinant": 1e-10,
    "right_residual": 1e-10,
    "left_residual": 1e-10,
    "biorthonormal": 1e-12,
    "inverse": 1e-12,
    "taylor": 1e-6,
    "absorption_slope": 0.1,
    "k_star_locus": 1e-10,
    "outflow_min": 0.01,
    "identity_A": 1e-14,
}
FD_STEP = 1e-6
ABSORPTION_EPS = (1e-1, 1e-2, 1e-3)

# reference Cartesian characteristic transforms (exact rationals)
CARTESIAN_TO_CHAR = np.array([
    [-1, 0, 0, 0, 1],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 1, 0, 0, 1],
    [0, -1, 0, 0, 1],
], dtype=float)
CARTESIAN_FROM_CHAR = np.array([
    [-1, 0, 0, 0.5, 0.5],
    [0, 0, 0, 0.5, -0.5],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 0.5, 0.5],
])


def cartesian_quasi3d_reference(u: float, v: float, w: float):
    """Exact Cartesian quasi-3D tables: (T, G, H) for inflow and for outflow."""
    T_in = CARTESIAN_TO_CHAR[:4].copy()
    G_in = np.array([
        [0, 0, 0, 0, 0],
        [0, u, v, 0, 1],
        [0, 0, 0, v, 0],
        [0, v, -u, 0, v],
    ], dtype=float)
    H_in = np.array([
        [0, 0, 0, 0, 0],
        [0, 0, w, 0, 0],
        [0, u, 0, w, 1],
        [0, w, 0, -u, w],
    ], dtype=float)
    T_out = CARTESIAN_TO_CHAR[4:].copy()
    G_out = np.array([[0, -v, u, 0, v]], dtype=float)
    H_out = np.array([[0, -w, 0, u, w]], dtype=float)
    return (T_in, G_in, H_in), (T_out, G_out, H_out)


@dataclass
class Check:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool
    sample: int | None = None
    mode: int | None = None
    detail: str = ""
    bound: str = "upper"  # upper: value <= tol; lower: value > tol; exact: equality

    def as_dict(self) -> dict:
        return asdict(self)


def _le(suite, name, value, tol, **kw) -> Check:
    value = float(value)
    return Check(suite, name, value, float(tol), bool(value <= tol), **kw)


def _tol(overrides, key):
    return float((overrides or {}).get(key, TOLERANCES[key]))


def _pair_error(closed: np.ndarray, numeric: np.ndarray) -> float:
    """Largest distance between greedily matched roots, over the largest |root|."""
    used = []
    err = 0.0
    for k in closed:
        d = np.abs(numeric - k)
        d[used] = np.inf
        j = int(np.argmin(d))
        used.append(j)
        err = max(err, d[j])
    return err / max(float(np.max(np.abs(closed))), 1e-300)


def numeric_k_roots(m: Metric, flow: MeanFlow, l, m_wn, omega) -> np.ndarray:
    """k-roots of det(-omega I + k A + l B + m C) from the generalized eigenproblem."""
    A, B, C = build_curvilinear(m, flow)
    B0 = -omega * np.eye(5) + l * B + m_wn * C
    return scipy.linalg.eig(-B0, A, right=False)


def suite_dispersion(draws, overrides=None) -> list:
    out = []
    tk, td = _tol(overrides, "k_roots"), _tol(overrides, "determinant")
    for i, s in enumerate(draws):
        l, mw = s.lp[0] * s.omega, s.lp[1] * s.omega
        kc = roots_k(s.metric, s.flow, l, mw, s.omega).k
        out.append(_le("dispersion", "k_roots", _pair_error(kc, numeric_k_roots(s.metric, s.flow, l, mw, s.omega)),
                       tk, sample=i))
        # off-root point so the determinant is not near zero
        dm = dispersion_matrix(s.metric, s.flow, WaveVector(kc[3] + 0.37 + 0.2j, l, mw, s.omega))
        scale = abs(dm.beta) ** 3 * (abs(dm.beta) ** 2 + float(np.sum(np.abs(dm.alpha) ** 2)))
        err = abs(dispersion_determinant(dm) - np.linalg.det(dm.matrix)) / scale
        out.append(_le("dispersion", "determinant", err, td, sample=i))
    return out


def eigen_residuals(n: int, s: sampling.Sample):
    """Relative kernel residuals (right, left) of mode n at a sample."""
    k = k_star(n, s.metric, s.flow, s.lp, s.omega) * s.omega
    wave = WaveVector(k, s.lp[0] * s.omega, s.lp[1] * s.omega, s.omega)
    D = dispersion_matrix(s.metric, s.flow, wave).matrix
    r = right_eigenvector(n, s.metric, s.flow, s.lp, s.omega)
    lv = left_eigenvector(n, s.metric, s.flow, s.lp, s.omega)
    nd = np.linalg.norm(D, 2)
    return (np.linalg.norm(D @ r) / (nd * np.linalg.norm(r)),
            np.linalg.norm(lv @ D) / (nd * np.linalg.norm(lv)))


def biorthonormality(m: Metric) -> dict:
    """Deviations of w_L w_R from the expected pattern."""
    wR, wL = limit_vectors(m)
    P = wL @ wR
    n = compute_norms(m)
    diag = float(np.max(np.abs(np.diag(P) - 1.0)))
    off = [P[a, b] for a in range(5) for b in range(5) if a != b and (a in (0, 3, 4) or b in (0, 3, 4))]
    return {
        "diagonal": diag,
        "off_diagonal_145": float(np.max(np.abs(off))),
        "w2L_w3R": float(abs(P[1, 2] - m.xi_y * m.xi_z / n.psi3**2)),
        "w3L_w2R": float(abs(P[2, 1] - m.xi_y * m.xi_z / n.psi2**2)),
    }


def suite_eigen(draws, overrides=None) -> list:
    out = []
    tr, tl, tb = _tol(overrides, "right_residual"), _tol(overrides, "left_residual"), _tol(overrides, "biorthonormal")
    for i, s in enumerate(draws):
        for n in range(1, 6):
            r, lv = eigen_residuals(n, s)
            out.append(_le("eigen", "right_residual", r, tr, sample=i, mode=n))
            out.append(_le("eigen", "left_residual", lv, tl, sample=i, mode=n))
        for name, v in biorthonormality(s.metric).items():
            out.append(_le("eigen", f"biorthonormal_{name}", v, tb, sample=i))
    return out


def suite_transform(draws, overrides=None, cartesian: bool = False) -> list:
    out = []
    ti = _tol(overrides, "inverse")
    if cartesian:
        t = build_transform(Metric.cartesian())
        out.append(Check("transform", "cartesian_to_char_exact", float(np.max(np.abs(t.to_char - CARTESIAN_TO_CHAR))),
                         0.0, bool(np.array_equal(t.to_char, CARTESIAN_TO_CHAR)), bound="exact"))
        out.append(Check("transform", "cartesian_from_char_exact",
                         float(np.max(np.abs(t.from_char - CARTESIAN_FROM_CHAR))),
                         0.0, bool(np.array_equal(t.from_char, CARTESIAN_FROM_CHAR)), bound="exact"))
    for i, s in enumerate(draws):
        exact = build_transform(s.metric, reconstruction="exact")
        dev = float(np.max(np.abs(exact.from_char @ exact.to_char - np.eye(5))))
        out.append(_le("transform", "exact_inverse", dev, ti, sample=i))
        modal = build_transform(s.metric)
        lr = modal.to_char @ modal.from_char
        expected = np.eye(5)
        n = compute_norms(s.metric)
        expected[1, 2] = s.metric.xi_y * s.metric.xi_z / n.psi3**2
        expected[2, 1] = s.metric.xi_y * s.metric.xi_z / n.psi2**2
        out.append(_le("transform", "modal_product_pattern", float(np.max(np.abs(lr - expected))), ti, sample=i,
                       detail="L R = I except the (2,3), (3,2) vorticity coupling"))
    return out


def taylor_fd_error(n: int, m: Metric, flow: MeanFlow, h: float = FD_STEP) -> float:
    """max |analytic - central difference| of dv_n/dlambda at lambda = 0."""
    _, d1, d2 = taylor_v_left(n, m, flow)
    err = 0.0
    for d, e in ((d1, (1, 0)), (d2, (0, 1))):
        plus = v_left(n, m, flow, LambdaPair(h * e[0], h * e[1]))
        minus = v_left(n, m, flow, LambdaPair(-h * e[0], -h * e[1]))
        fd = (plus - minus) / (2 * h)
        err = max(err, float(np.max(np.abs(fd - d))))
    return err


def absorption_residuals(m: Metric, flow: MeanFlow, direction=(1.0, 0.0), eps=ABSORPTION_EPS, omega=1.0):
    """|outflow quasi-3D residual| / |omega| on the outgoing acoustic mode at lambda = eps * direction."""
    op = build_quasi3d(m, flow, "outflow")
    res = []
    for e in eps:
        lp = LambdaPair(e * direction[0], e * direction[1])
        u = right_eigenvector(4, m, flow, lp, omega)
        l, mw = lp[0] * omega, lp[1] * omega
        r = bc_residual(op, -1j * omega * u, 1j * l * u, 1j * mw * u)
        res.append(float(np.max(np.abs(r))) / abs(omega))
    return np.array(res)


def loglog_slope(eps, res) -> float:
    return float(np.polyfit(np.log10(eps), np.log10(res), 1)[0])


def suite_quasi3d(draws, overrides=None, cartesian: bool = False) -> list:
    out = []
    tt, ts = _tol(overrides, "taylor"), _tol(overrides, "absorption_slope")
    if cartesian:
        u, v, w = 0.5, 0.1, 0.2
        flow = MeanFlow(u, v, w)
        ref = cartesian_quasi3d_reference(u, v, w)
        for side, (T, G, H) in zip(("inflow", "outflow"), ref):
            op = build_quasi3d(Metric.cartesian(), flow, side)
            ok = np.array_equal(op.time_rows, T) and np.array_equal(op.G, G) and np.array_equal(op.H, H)
            dev = max(float(np.max(np.abs(a - b))) for a, b in ((op.time_rows, T), (op.G, G), (op.H, H)))
            out.append(Check("quasi3d", f"cartesian_{side}_exact", dev, 0.0, bool(ok), bound="exact"))
    for i, s in enumerate(draws):
        for n in range(1, 6):
            out.append(_le("quasi3d", "taylor_fd", taylor_fd_error(n, s.metric, s.flow), tt, sample=i, mode=n))
        d = np.array([s.lp[0].real, s.lp[1].real])
        d = d / np.linalg.norm(d) if np.linalg.norm(d) > 0 else np.array([1.0, 0.0])
        res = absorption_residuals(s.metric, s.flow, d)
        slope = loglog_slope(ABSORPTION_EPS, res)
        out.append(_le("quasi3d", "absorption_slope_dev", abs(slope - 2.0), ts, sample=i,
                       detail=f"slope {slope:.4f}"))
    return out


def locus_point(rng) -> tuple:
    """(l, m) with (l, m) != (0, 0) for the ill-posed-frequency checks."""
    th = rng.uniform(0, 2 * np.pi)
    r = rng.uniform(0.2, 2.0)
    return float(r * np.cos(th)), float(r * np.sin(th))


def suite_wellposed(draws, overrides=None, seed: int = 0, sweep_n: int = 50) -> list:
    out = []
    tk, to = _tol(overrides, "k_star_locus"), _tol(overrides, "outflow_min")
    rng = sampling.make_rng(seed + 1)
    for i, s in enumerate(draws):
        l, mw = locus_point(rng)
        f = detect_illposed_inflow(s.metric, s.flow, l, mw)
        out.append(Check("wellposed", "inflow_rank", float(f.rank), 2.0, f.rank == 2, sample=i, detail=f.message,
                         bound="exact"))
        U = contravariant(s.metric, s.flow)[0]
        kerr = max(abs(f.k3_star - 1 / U), abs(f.k4_star - 1 / U)) * abs(U)
        out.append(_le("wellposed", "k3_k4_equal_1_over_U", kerr, tk, sample=i))
        chk = outflow_wellposed_check(s.metric, s.flow, n=sweep_n, threshold=to)
        out.append(Check("wellposed", "outflow_min_abs_scalar", chk["min_abs_scalar"], to,
                         chk["min_abs_scalar"] > to, sample=i, bound="lower"))
    return out


def suite_modified(draws, overrides=None, seed: int = 0, orthogonal_draws=None) -> list:
    out = []
    ta = _tol(overrides, "identity_A")
    for u in (0.0, 0.3, 0.5, 0.8):
        c = compute_m(Metric.cartesian(), MeanFlow(u))
        exact = c.m1 == c.m2 == -(u + 1) / 2 and c.A2 == 0.0
        out.append(Check("modified", "cartesian_m_and_A2", abs(c.m1 + (u + 1) / 2) + abs(c.A2), 0.0, bool(exact),
                         detail=f"u = {u}", bound="exact"))
    for i, s in enumerate(draws):
        for form in ("norms", "exact"):
            c = compute_m(s.metric, s.flow, form)
            A1, _, A3 = reflection_coefficients(s.metric, s.flow, c.m1, c.m2, form)
            U = contravariant(s.metric, s.flow)[0]
            nx = compute_norms(s.metric).norm_xi
            n = compute_norms(s.metric)
            scale = max(1.0, 0.5 * (U + nx) * max(n.norm_eta, n.norm_zeta) ** 2)
            out.append(_le("modified", f"A1_A3_zero_{form}", max(abs(A1), abs(A3)) / scale, ta, sample=i))
    rng = sampling.make_rng(seed + 2)
    for i, s in enumerate(orthogonal_draws or []):
        l, mw = locus_point(rng)
        f = check_locus(s.metric, s.flow, l, mw)
        out.append(Check("modified", "locus_rank_jordan", float(f.rank), 4.0, f.rank == 4, sample=i, bound="exact"))
        plain = check_locus(s.metric, s.flow, l, mw, basis="plain")
        out.append(Check("modified", "locus_rank_plain", float(plain.rank), 3.0, plain.rank == 3, sample=i,
                         detail="u4 is parallel to u2 on the locus, so the plain basis caps the rank at 3",
                         bound="exact"))
    return out


def run_suite(name: str, n: int = 100, seed: int = 0, metric: Metric | None = None,
              overrides: dict | None = None, n_orthogonal: int = 20) -> list:
    """Run one suite (or ``"all"``) on ``n`` seeded samples."""
    if name == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, n, seed, metric, overrides, n_orthogonal)
        return out
    if name not in SUITES:
        raise KeyError(name)
    cartesian = metric is not None and metric == Metric.cartesian()
    if name in ("wellposed",):
        draws = sampling.samples(seed, min(n, n_orthogonal) if metric is None else n, metric, orthogonal=True)
        return suite_wellposed(draws, overrides, seed)
    draws = sampling.samples(seed, n, metric)
    if name == "dispersion":
        return suite_dispersion(draws, overrides)
    if name == "eigen":
        return suite_eigen(draws, overrides)
    if name == "transform":
        return suite_transform(draws, overrides, cartesian)
    if name == "quasi3d":
        return suite_quasi3d(draws, overrides, cartesian)
    ortho = sampling.samples(seed + 3, n_orthogonal, metric, orthogonal=True)
    return suite_modified(draws, overrides, seed, ortho)


def summarize(checks) -> dict:
    failed = [c for c in checks if not c.passed]
    by_name = {}
    for c in checks:
        key = f"{c.suite}.{c.name}"
        e = by_name.setdefault(key, {"count": 0, "failed": 0, "worst": c.value, "tol": c.tol, "bound": c.bound})
        e["count"] += 1
        e["failed"] += int(not c.passed)
        if c.bound == "lower":
            e["worst"] = min(e["worst"], c.value)
        elif c.bound == "upper":
            e["worst"] = max(e["worst"], c.value)
        elif not c.passed:
            e["worst"] = c.value
    return {"passed": not failed, "n_checks": len(checks), "n_failed": len(failed), "by_name": by_name}
