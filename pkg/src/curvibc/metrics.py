"""Grid-metric algebra: norms, contravariant velocities and coordinate mappings.

A :class:`Metric` holds the nine derivatives of the computational
coordinates (xi, eta, zeta) with respect to the Cartesian ones at a single
boundary point.  Every other quantity in the package is derived from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import DimensionalModeUnsupported, SingularMapping, UnknownMapping

GAMMA = 1.4
REL_TOL = 1e-12

_COMPONENTS = (
    "xi_x", "xi_y", "xi_z",
    "eta_x", "eta_y", "eta_z",
    "zeta_x", "zeta_y", "zeta_z",
)


@dataclass(frozen=True)
class Metric:
    """Derivatives of (xi, eta, zeta) with respect to (x, y, z) at a point."""

    xi_x: float
    xi_y: float
    xi_z: float
    eta_x: float
    eta_y: float
    eta_z: float
    zeta_x: float
    zeta_y: float
    zeta_z: float

    def __post_init__(self):
        mat = self.as_matrix()
        if not np.all(np.isfinite(mat)):
            raise SingularMapping("metric has non-finite components")
        scale = float(np.max(np.abs(mat)))
        if scale == 0.0 or abs(np.linalg.det(mat)) <= REL_TOL * scale**3:
            raise SingularMapping("metric matrix is singular")

    @classmethod
    def cartesian(cls) -> "Metric":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, mat) -> "Metric":
        """Build from a 3x3 array whose rows are grad(xi), grad(eta), grad(zeta)."""
        mat = np.asarray(mat, dtype=float).reshape(3, 3)
        return cls(*(float(v) for v in mat.ravel()))

    @classmethod
    def from_jacobian(cls, jac) -> "Metric":
        """Build from the forward Jacobian d(x, y, z)/d(xi, eta, zeta)."""
        jac = np.asarray(jac, dtype=float).reshape(3, 3)
        try:
            inv = np.linalg.inv(jac)
        except np.linalg.LinAlgError as exc:
            raise SingularMapping("forward Jacobian is singular") from exc
        return cls.from_matrix(inv)

    def as_matrix(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in _COMPONENTS]).reshape(3, 3)

    def jacobian(self) -> np.ndarray:
        """Forward Jacobian d(x, y, z)/d(xi, eta, zeta)."""
        return np.linalg.inv(self.as_matrix())

    def scaled(self, s: float) -> "Metric":
        return Metric.from_matrix(s * self.as_matrix())

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.xi_x, self.xi_y, self.xi_z])

    @property
    def eta(self) -> np.ndarray:
        return np.array([self.eta_x, self.eta_y, self.eta_z])

    @property
    def zeta(self) -> np.ndarray:
        return np.array([self.zeta_x, self.zeta_y, self.zeta_z])


@dataclass(frozen=True)
class MetricNorms:
    norm_xi: float
    norm_eta: float
    norm_zeta: float
    dot_xieta: float
    dot_xizeta: float
    dot_etazeta: float
    psi2: float
    psi3: float


@dataclass(frozen=True)
class MeanFlow:
    """Uniform mean state.

    Nondimensional mode (the default) fixes rho_bar = c_bar = 1.  Set
    ``dimensional=True`` to carry arbitrary positive density and sound speed.
    """

    u_bar: float = 0.0
    v_bar: float = 0.0
    w_bar: float = 0.0
    rho_bar: float = 1.0
    c_bar: float = 1.0
    p_bar: float | None = None
    dimensional: bool = False

    def __post_init__(self):
        if self.p_bar is None:
            object.__setattr__(self, "p_bar", self.rho_bar * self.c_bar**2 / GAMMA)
        vals = [getattr(self, f.name) for f in fields(self) if f.name != "dimensional"]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("mean flow has non-finite entries")
        if self.rho_bar <= 0 or self.c_bar <= 0 or self.p_bar <= 0:
            raise ValueError("rho_bar, c_bar and p_bar must be positive")
        if not self.dimensional and (self.rho_bar != 1.0 or self.c_bar != 1.0):
            raise DimensionalModeUnsupported(
                "nondimensional mean flow requires rho_bar = c_bar = 1; "
                "pass dimensional=True for other values"
            )

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.u_bar, self.v_bar, self.w_bar])

    def nondimensionalized(self) -> "MeanFlow":
        """Same flow in units of rho_bar and c_bar."""
        c = self.c_bar
        return MeanFlow(self.u_bar / c, self.v_bar / c, self.w_bar / c)

    def with_velocity(self, vel) -> "MeanFlow":
        u, v, w = (float(x) for x in vel)
        return MeanFlow(u, v, w, self.rho_bar, self.c_bar, self.p_bar, self.dimensional)


class ContravariantFlow(NamedTuple):
    U_bar: float
    V_bar: float
    W_bar: float


def compute_norms(m: Metric) -> MetricNorms:
    xi, eta, zeta = m.xi, m.eta, m.zeta
    return MetricNorms(
        norm_xi=math.sqrt(xi @ xi),
        norm_eta=math.sqrt(eta @ eta),
        norm_zeta=math.sqrt(zeta @ zeta),
        dot_xieta=float(xi @ eta),
        dot_xizeta=float(xi @ zeta),
        dot_etazeta=float(eta @ zeta),
        psi2=math.hypot(m.xi_x, m.xi_y),
        psi3=math.hypot(m.xi_x, m.xi_z),
    )


def contravariant(m: Metric, flow: MeanFlow) -> ContravariantFlow:
    vel = flow.velocity
    return ContravariantFlow(float(m.xi @ vel), float(m.eta @ vel), float(m.zeta @ vel))


def is_orthogonal(m: Metric, tol: float = REL_TOL) -> bool:
    n = compute_norms(m)
    return (
        abs(n.dot_xieta) <= tol * n.norm_xi * n.norm_eta
        and abs(n.dot_xizeta) <= tol * n.norm_xi * n.norm_zeta
        and abs(n.dot_etazeta) <= tol * n.norm_eta * n.norm_zeta
    )


# ---------------------------------------------------------------------------
# Metric fields over structured grids
# ---------------------------------------------------------------------------


@dataclass
class MetricField:
    """Metric components and node coordinates on a structured grid.

    ``components`` has shape (3, 3, ni, nj, nk) with the same row layout as
    :meth:`Metric.as_matrix`; ``coords`` has shape (3, ni, nj, nk).
    """

    components: np.ndarray
    coords: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.components.shape[2:]

    def at(self, i: int, j: int, k: int) -> Metric:
        return Metric.from_matrix(self.components[:, :, i, j, k])

    def check_nonsingular(self) -> None:
        comp = np.moveaxis(self.components, (0, 1), (-2, -1))
        if not np.all(np.isfinite(comp)):
            raise SingularMapping("metric field has non-finite entries")
        det = np.linalg.det(comp)
        scale = np.max(np.abs(comp), axis=(-2, -1))
        bad = np.abs(det) <= REL_TOL * scale**3
        if np.any(bad):
            idx = tuple(int(v[0]) for v in np.nonzero(bad))
            raise SingularMapping(f"singular metric at node {idx}")


def _index_grid(shape, offset=(0, 0, 0)):
    ni, nj, nk = shape
    i, j, k = np.meshgrid(
        np.arange(ni, dtype=float) + offset[0],
        np.arange(nj, dtype=float) + offset[1],
        np.arange(nk, dtype=float) + offset[2],
        indexing="ij",
    )
    return i, j, k


def _identity(shape, params, offset):
    dx, dy, dz = (float(params.get(k, 1.0)) for k in ("dx", "dy", "dz"))
    i, j, k = _index_grid(shape, offset)
    coords = np.stack([i * dx, j * dy, k * dz])
    comp = np.zeros((3, 3) + tuple(shape))
    comp[0, 0], comp[1, 1], comp[2, 2] = 1 / dx, 1 / dy, 1 / dz
    return comp, coords


def _stretched(shape, params, offset):
    # x = d ((1 + s)^p - 1) / p per axis, so dx/ds = d (1 + s)^(p - 1)
    i, j, k = _index_grid(shape, offset)
    comp = np.zeros((3, 3) + tuple(shape))
    coords = []
    for axis, s in enumerate((i, j, k)):
        name = "xyz"[axis]
        d = float(params.get(f"d{name}", 1.0))
        p = float(params.get(f"p{name}", 1.0))
        if np.any(1.0 + s <= 0):
            raise SingularMapping("stretched mapping needs index offset > -1")
        coords.append(d * ((1.0 + s) ** p - 1.0) / p)
        comp[axis, axis] = 1.0 / (d * (1.0 + s) ** (p - 1.0))
    return comp, np.stack(coords)


def _sheared(shape, params, offset):
    mat = np.eye(3)
    for r, row in enumerate(("xi", "eta", "zeta")):
        for c, col in enumerate("xyz"):
            key = f"{row}_{col}"
            if key in params:
                mat[r, c] = float(params[key])
    Metric.from_matrix(mat)  # validates nonsingularity
    inv = np.linalg.inv(mat)
    i, j, k = _index_grid(shape, offset)
    coords = np.einsum("ab,bijk->aijk", inv, np.stack([i, j, k]))
    comp = np.broadcast_to(mat[:, :, None, None, None], (3, 3) + tuple(shape)).copy()
    return comp, coords


def _cylindrical_sector(shape, params, offset):
    r0 = float(params.get("r0", 10.0))
    dr = float(params.get("dr", 1.0))
    dtheta = float(params.get("dtheta", 0.02))
    theta0 = float(params.get("theta0", 0.0))
    dz = float(params.get("dz", 1.0))
    i, j, k = _index_grid(shape, offset)
    r = r0 + i * dr
    if np.any(r <= 0):
        raise SingularMapping("cylindrical sector reaches the axis")
    th = theta0 + j * dtheta
    coords = np.stack([r * np.cos(th), r * np.sin(th), k * dz])
    comp = np.zeros((3, 3) + tuple(shape))
    comp[0, 0] = np.cos(th) / dr
    comp[0, 1] = np.sin(th) / dr
    comp[1, 0] = -np.sin(th) / (r * dtheta)
    comp[1, 1] = np.cos(th) / (r * dtheta)
    comp[2, 2] = 1.0 / dz
    return comp, coords


MAPPINGS = {
    "identity": _identity,
    "stretched": _stretched,
    "sheared": _sheared,
    "cylindrical-sector": _cylindrical_sector,
}


def analytic_mapping(name: str, params: dict | None = None, shape=(8, 8, 8),
                     offset=(0, 0, 0)) -> MetricField:
    """Exact metrics of a named analytic mapping on an index grid.

    Parameters
    ----------
    name : str
        One of ``identity``, ``stretched``, ``sheared``, ``cylindrical-sector``.
    params : dict
        Mapping parameters (see the README for the keys of each mapping).
    shape : tuple of int
        Grid size (ni, nj, nk).
    offset : tuple of float
        Index offset; lets an extended grid reuse the same mapping.
    """
    if name not in MAPPINGS:
        raise UnknownMapping(f"unknown mapping {name!r}; known: {sorted(MAPPINGS)}")
    comp, coords = MAPPINGS[name](tuple(int(n) for n in shape), dict(params or {}), offset)
    field = MetricField(components=comp, coords=coords)
    field.check_nonsingular()
    return field


# ---------------------------------------------------------------------------
# Grid files
# ---------------------------------------------------------------------------


def read_grid(path) -> np.ndarray:
    """Read a plain-text structured grid.

    The first line holds ``ni nj nk``; the remaining ni*nj*nk lines hold
    ``x y z`` with k varying fastest.  Returns coordinates of shape
    (3, ni, nj, nk).
    """
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("grid header must be 'ni nj nk'")
        ni, nj, nk = (int(v) for v in header)
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (ni * nj * nk, 3):
        raise ValueError(f"expected {ni * nj * nk} coordinate lines, got {data.shape[0]}")
    return data.T.reshape(3, ni, nj, nk)


def write_grid(path, coords) -> None:
    coords = np.asarray(coords)
    ni, nj, nk = coords.shape[1:]
    with open(path, "w") as fh:
        fh.write(f"{ni} {nj} {nk}\n")
        np.savetxt(fh, coords.reshape(3, -1).T, fmt="%.17g")


_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_ONE_SIDED = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def fd_derivative(f: np.ndarray, axis: int) -> np.ndarray:
    """Fourth-order derivative along ``axis`` with unit spacing.

    Central in the interior, one-sided fourth-order at the two nodes nearest
    each end.  Axes with a single node have zero derivative; axes with fewer
    than five nodes fall back to ``np.gradient``.
    """
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    n = f.shape[0]
    out = np.zeros_like(f)
    if n == 1:
        return np.moveaxis(out, 0, axis)
    if n < 5:
        return np.moveaxis(np.gradient(f, axis=0, edge_order=2 if n > 2 else 1), 0, axis)
    for s, c in enumerate(_CENTRAL):
        out[2:n - 2] += c * f[s:n - 4 + s]
    for row, coef in enumerate(_ONE_SIDED):
        out[row] = np.tensordot(coef, f[0:5], axes=1)
        out[n - 1 - row] = -np.tensordot(coef, f[::-1][:5], axes=1)
    return np.moveaxis(out, 0, axis)


def metrics_from_coords(coords: np.ndarray) -> MetricField:
    """Metric field from node coordinates by fourth-order differences.

    Directions with a single node are treated as unit-spaced along the
    matching Cartesian axis.
    """
    coords = np.asarray(coords, dtype=float)
    shape = coords.shape[1:]
    jac = np.zeros((3, 3) + shape)
    for axis in range(3):
        if shape[axis] == 1:
            jac[axis, axis] = 1.0
            continue
        for comp in range(3):
            jac[comp, axis] = fd_derivative(coords[comp], axis)
    jm = np.moveaxis(jac, (0, 1), (-2, -1))
    det = np.linalg.det(jm)
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) < 1e-300):
        raise SingularMapping("grid has a singular cell")
    inv = np.linalg.inv(jm)
    field = MetricField(components=np.moveaxis(inv, (-2, -1), (0, 1)).copy(), coords=coords)
    field.check_nonsingular()
    return field
