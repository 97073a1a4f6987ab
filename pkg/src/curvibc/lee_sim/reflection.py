"""Reflection measurement against a boundary-free reference run.

The reference run uses the same mapping on a periodic xi-domain padded on
both sides, long enough that nothing wraps around to a probe plane within
the run time.  Its probe histories are the incident signal; the difference
test - reference is the reflected one.  Both are measured peak-to-peak in
pressure over the whole history and every node of the probe plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NoSignal
from .config import SimConfig
from .solver import RunResult, Simulation, build_field

NOSIGNAL_FRACTION = 0.01
WRAP_MARGIN = 8


@dataclass
class Reflection:
    ratio: float
    incident: float
    reflected: float
    per_plane: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"ratio": self.ratio, "incident": self.incident, "reflected": self.reflected,
                "per_plane": {str(k): v for k, v in self.per_plane.items()}}


def max_xi_speed(sim: Simulation) -> float:
    """Largest |U| + |xi| over the grid: fastest signal speed in xi-index units."""
    U = np.abs(sim.contra[0])
    nx = np.linalg.norm(sim.mat[0], axis=0)
    return float(np.max(U + nx))


def reference_config(cfg: SimConfig, speed: float) -> tuple[SimConfig, int]:
    """Periodic, padded copy of ``cfg`` and the pad width on each side."""
    if cfg.grid.grid_file:
        raise ConfigError("reflection measurement needs an analytic mapping")
    ni = cfg.grid.shape[0]
    T = cfg.time.dt * cfg.time.n_steps
    pad = int(math.ceil(speed * T / 2)) + WRAP_MARGIN
    ref = cfg.replace(
        grid={"shape": (ni + 2 * pad,) + tuple(cfg.grid.shape[1:]),
              "offset": (cfg.grid.offset[0] - pad,) + tuple(cfg.grid.offset[1:])},
        boundary={"periodic_xi": True},
    )
    return ref, pad


def run_reference(cfg: SimConfig, speed: float | None = None) -> tuple[RunResult, int]:
    if speed is None:
        speed = max_xi_speed(Simulation(cfg.replace(boundary={"periodic_xi": True})))
    ref_cfg, pad = reference_config(cfg, speed)
    sim = Simulation(ref_cfg, build_field(ref_cfg), xi_offset=-pad)
    return sim.run(), pad


def measure_reflection(test: RunResult, ref: RunResult, planes=None) -> Reflection:
    """Peak-to-peak pressure of (test - reference) over peak-to-peak of the reference.

    Raises NoSignal when the incident pulse never reaches a probe plane.
    """
    planes = list(planes if planes is not None else test.probes)
    amp = test.config.pulse.amplitude
    inc_total = 0.0
    ref_total = 0.0
    per = {}
    for i in planes:
        p_ref = ref.probes[i][:, 4]
        p_test = test.probes[i][:, 4]
        if p_ref.shape != p_test.shape:
            raise ValueError("test and reference histories differ in length")
        inc = float(np.ptp(p_ref))
        if inc < NOSIGNAL_FRACTION * amp:
            raise NoSignal(f"the pulse never reached probe plane {i}")
        refl = float(np.ptp(p_test - p_ref))
        per[i] = {"incident": inc, "reflected": refl, "ratio": refl / inc}
        inc_total += inc
        ref_total += refl
    return Reflection(ref_total / inc_total, inc_total, ref_total, per)


def reference_key(cfg: SimConfig) -> str:
    """Digest of everything the reference run depends on."""
    return cfg.replace(boundary={"inflow": "first_order", "outflow": "first_order",
                                 "modified_form": "norms"}, run={"name": "reference"}).digest()


def run_experiment(cfg: SimConfig, variants=None, reference: RunResult | None = None,
                   progress=None) -> dict:
    """Run ``cfg`` (and optional (inflow, outflow) variant pairs) against one reference.

    Returns {label: (RunResult, Reflection)} plus the key ``"reference"``.
    """
    variants = list(variants or [(cfg.boundary.inflow, cfg.boundary.outflow)])
    if reference is None:
        reference, _ = run_reference(cfg)
    out = {"reference": reference}
    for inflow, outflow in variants:
        c = cfg.replace(boundary={"inflow": inflow, "outflow": outflow})
        res = Simulation(c).run(progress=progress)
        out[f"{inflow}/{outflow}"] = (res, measure_reflection(res, reference))
    return out
