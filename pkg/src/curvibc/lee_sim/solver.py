"""Finite-difference solver for the curvilinear linearized Euler equations.

Interior: fourth-order central differences, classical RK4, and an
eighth-order low-pass filter after every step.  Tangential directions are
periodic.  Along xi the domain is either periodic or closed by boundary
operators at i = 0 (inflow) and i = ni - 1 (outflow).
"""
from __future__ import annotations

import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..bc_modified import build_modified
from ..bc_quasi3d import build_quasi3d
from ..eigenvectors import limit_vectors
from ..errors import ConfigError, Instability, SingularClosure
from ..metrics import MeanFlow, Metric, MetricField, analytic_mapping, metrics_from_coords, read_grid
from . import kernels
from .config import SimConfig, validate
from .pulse import initial_field

GROWTH_LIMIT = 1e6
CLOSURE_COND_LIMIT = 1e12
CONSTANT_FACE_TOL = 1e-13
CFL_LIMIT = 1.0

INCOMING = {"inflow": (0, 1, 2, 3), "outflow": (4,)}
OUTGOING = {"inflow": (4,), "outflow": (0, 1, 2, 3)}
ACOUSTIC_IN = {"inflow": 3, "outflow": 4}


@dataclass
class FieldState:
    q: np.ndarray
    t: float = 0.0
    step: int = 0

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.q)):
            bad = tuple(int(v[0]) for v in np.nonzero(~np.isfinite(self.q)))
            raise Instability(f"non-finite value at step {self.step}, t = {self.t:g}, index {bad}")


@dataclass
class RunResult:
    times: np.ndarray
    probes: dict
    energy: np.ndarray
    backend: str
    wall_time: float
    config: SimConfig
    final: FieldState | None = field(default=None, repr=False)


def build_field(cfg: SimConfig, shape=None, offset=None) -> MetricField:
    g = cfg.grid
    shape = tuple(shape or g.shape)
    offset = tuple(offset if offset is not None else g.offset)
    if g.grid_file:
        coords = read_grid(g.grid_file)
        if coords.shape[1:] != shape:
            raise ConfigError(f"grid file has shape {coords.shape[1:]}, config says {shape}")
        return metrics_from_coords(coords)
    return analytic_mapping(g.mapping, g.params, shape, offset)


def cfl_number(mat: np.ndarray, contra: np.ndarray, dt: float) -> float:
    """max over nodes and directions of (|U_a| + |grad a|) dt, in index units."""
    speed = np.abs(contra) + np.linalg.norm(mat, axis=1)
    return float(np.max(speed) * dt)


def energy(q: np.ndarray) -> float:
    """0.5 sum(|u|^2 + p^2 + (rho - p)^2): acoustic plus entropy energy."""
    e = q[1] ** 2 + q[2] ** 2 + q[3] ** 2 + q[4] ** 2 + (q[0] - q[4]) ** 2
    return 0.5 * float(np.sum(e))


def _incoming_rows(m: Metric, flow: MeanFlow, side: str, variant: str, form: str):
    _, wL = limit_vectors(m)
    rows = list(INCOMING[side])
    if variant in ("first_order", "hard_wall"):
        T = wL[rows].copy()
        G = np.zeros_like(T)
        H = np.zeros_like(T)
        if variant == "hard_wall":
            xi = m.xi
            T[rows.index(ACOUSTIC_IN[side])] = np.r_[0.0, xi / np.linalg.norm(xi), 0.0]
        return T, G, H
    if variant == "quasi3d":
        op = build_quasi3d(m, flow, side)
    elif variant == "modified":
        if side != "inflow":
            raise ConfigError("the modified conditions are inflow-only")
        op = build_modified(m, flow, form=form)
    else:
        raise ConfigError(f"unknown boundary variant {variant!r}")
    return op.time_rows, op.G, op.H


def face_closure(m: Metric, flow: MeanFlow, side: str, variant: str, form: str = "norms") -> np.ndarray:
    """(P, K_eta, K_zeta) with Q_t = P R + K_eta Q_eta + K_zeta Q_zeta at one face node.

    R is the interior-scheme time derivative.  Incoming rows come from the
    boundary operator, outgoing rows are the one-dimensional left vectors
    applied to R.
    """
    U = float(m.xi @ flow.velocity)
    nx = float(np.linalg.norm(m.xi))
    if not 0.0 < U < nx:
        raise ConfigError(f"{side} face needs subsonic flow into the domain along xi (U = {U:g}, |xi| = {nx:g})")
    _, wL = limit_vectors(m)
    T, G, H = _incoming_rows(m, flow, side, variant, form)
    inc, out = list(INCOMING[side]), list(OUTGOING[side])
    M = np.zeros((5, 5))
    M[inc] = T
    M[out] = wL[out]
    if np.linalg.cond(M) > CLOSURE_COND_LIMIT:
        raise SingularClosure(f"{side} closure matrix is singular")
    Minv = np.linalg.inv(M)
    return np.stack([Minv[:, out] @ wL[out], -Minv[:, inc] @ G, -Minv[:, inc] @ H])


def build_closure(field: MetricField, flow: MeanFlow, inflow: str, outflow: str,
                  form: str = "norms") -> np.ndarray:
    """Closure array (2, nj, nk, 3, 5, 5) for the faces i = 0 and i = ni - 1."""
    comp = field.components
    ni, nj, nk = comp.shape[2:]
    out = np.zeros((2, nj, nk, 3, 5, 5))
    for face, (i, side, variant) in enumerate(((0, "inflow", inflow), (ni - 1, "outflow", outflow))):
        plane = comp[:, :, i]
        scale = np.max(np.abs(plane))
        if np.max(np.ptp(plane.reshape(9, -1), axis=1)) <= CONSTANT_FACE_TOL * scale:
            out[face] = face_closure(Metric.from_matrix(plane[:, :, 0, 0]), flow, side, variant, form)
            continue
        for j in range(nj):
            for k in range(nk):
                out[face, j, k] = face_closure(Metric.from_matrix(plane[:, :, j, k]), flow, side, variant, form)
    return out


class Simulation:
    """One configured run.

    Parameters
    ----------
    cfg : SimConfig
        Validated configuration.
    field : MetricField, optional
        Precomputed metrics; built from ``cfg.grid`` when omitted.
    xi_offset : float
        Index offset of this grid relative to the configured one (pulse
        center and probe planes are given in configured indices).
    """

    def __init__(self, cfg: SimConfig, field: MetricField | None = None, xi_offset: float = 0.0):
        validate(cfg)
        self.cfg = cfg
        self.field = field if field is not None else build_field(cfg)
        self.xi_offset = xi_offset
        self.flow = MeanFlow(*(float(v) for v in cfg.flow.velocity))
        self.mat = np.ascontiguousarray(self.field.components, dtype=float)
        self.contra = np.ascontiguousarray(np.einsum("abijk,b->aijk", self.mat, self.flow.velocity))
        b = cfg.boundary
        self.periodic_xi = bool(b.periodic_xi)
        if self.periodic_xi:
            self.closure = np.zeros((2, 1, 1, 3, 5, 5))
        else:
            self.closure = build_closure(self.field, self.flow, b.inflow, b.outflow, b.modified_form)
        self.cfl = cfl_number(self.mat, self.contra, cfg.time.dt)
        if self.cfl > CFL_LIMIT:
            warnings.warn(f"CFL number {self.cfl:.3g} exceeds the advisory limit {CFL_LIMIT}", stacklevel=2)
        self._rhs, self._filt, self.backend = kernels.backend()
        self._k = [np.empty((5,) + self.shape) for _ in range(4)]
        self._tmp = np.empty((5,) + self.shape)

    @property
    def shape(self) -> tuple:
        return tuple(self.mat.shape[2:])

    def plane_index(self, i: int) -> int:
        return int(round(i - self.xi_offset))

    def initial_state(self) -> FieldState:
        rng = np.random.Generator(np.random.PCG64(self.cfg.run.seed))
        q = initial_field(self.cfg.pulse, self.field, self.flow.velocity, self.xi_offset, rng)
        return FieldState(np.ascontiguousarray(q), 0.0, 0)

    def rhs(self, q: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        out = np.empty_like(q) if out is None else out
        return self._rhs(q, self.mat, self.contra, self.periodic_xi, self.closure, out)

    def step(self, state: FieldState) -> FieldState:
        dt = self.cfg.time.dt
        q = state.q
        k1, k2, k3, k4 = self._k
        tmp = self._tmp
        self.rhs(q, k1)
        np.multiply(k1, 0.5 * dt, out=tmp)
        tmp += q
        self.rhs(tmp, k2)
        np.multiply(k2, 0.5 * dt, out=tmp)
        tmp += q
        self.rhs(tmp, k3)
        np.multiply(k3, dt, out=tmp)
        tmp += q
        self.rhs(tmp, k4)
        new = k2 + k3
        new *= 2.0
        new += k1
        new += k4
        new *= dt / 6.0
        new += q
        f = self.cfg.filter
        if f.enabled and f.strength > 0:
            self._filt(new, f.strength, self.periodic_xi, tmp)
            new[...] = tmp
        return FieldState(new, state.t + dt, state.step + 1)

    def run(self, n_steps: int | None = None, state: FieldState | None = None, progress=None) -> RunResult:
        """Advance ``n_steps`` steps, recording probe planes and energy after every step."""
        n_steps = self.cfg.time.n_steps if n_steps is None else n_steps
        state = state or self.initial_state()
        planes = [self.plane_index(i) for i in self.cfg.probes.planes]
        for p in planes:
            if not 0 <= p < self.shape[0]:
                raise ConfigError(f"probe plane {p} outside the grid")
        nj, nk = self.shape[1:]
        hist = {i: np.empty((n_steps + 1, 5, nj, nk)) for i in self.cfg.probes.planes}
        times = np.empty(n_steps + 1)
        en = np.empty(n_steps + 1)
        e0 = energy(state.q)
        t0 = _time.perf_counter()
        for n in range(n_steps + 1):
            if n:
                state = self.step(state)
            times[n] = state.t
            en[n] = energy(state.q)
            if not np.isfinite(en[n]):
                state.check_finite()
            if e0 > 0 and en[n] > GROWTH_LIMIT**2 * e0:
                raise Instability(f"field norm grew by more than {GROWTH_LIMIT:g}x by step {state.step}")
            for i, p in zip(self.cfg.probes.planes, planes):
                hist[i][n] = state.q[:, p]
            if progress is not None:
                progress(state)
        return RunResult(times, hist, en, self.backend, _time.perf_counter() - t0, self.cfg, state)
