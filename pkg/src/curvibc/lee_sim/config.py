"""Simulation configuration: dataclasses, TOML loading and validation."""
from __future__ import annotations

import copy
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FACE_VARIANTS = ("first_order", "quasi3d", "modified", "hard_wall")
PULSE_TYPES = ("acoustic", "vorticity", "entropy")
DIRECTIONS = ("both", "downstream", "upstream")


@dataclass
class GridSpec:
    shape: tuple = (64, 32, 32)
    mapping: str = "identity"
    params: dict = field(default_factory=dict)
    grid_file: str | None = None
    offset: tuple = (0.0, 0.0, 0.0)


@dataclass
class FlowSpec:
    velocity: tuple = (0.3, 0.0, 0.0)


@dataclass
class BoundarySpec:
    inflow: str = "quasi3d"
    outflow: str = "quasi3d"
    periodic_xi: bool = False
    modified_form: str = "norms"


@dataclass
class PulseSpec:
    type: str = "acoustic"
    direction: str = "both"
    center: float = 32.0
    width: float = 8.0
    amplitude: float = 1e-3
    angle_deg: float = 0.0
    eta_modes: int = 0
    noise: float = 0.0


@dataclass
class TimeSpec:
    dt: float = 0.5
    n_steps: int = 200


@dataclass
class FilterSpec:
    strength: float = 0.1
    enabled: bool = True


@dataclass
class ProbeSpec:
    planes: tuple = (8, 55)


@dataclass
class RunSpec:
    seed: int = 0
    name: str = "run"
    measure_reflection: bool = False


@dataclass
class SimConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    flow: FlowSpec = field(default_factory=FlowSpec)
    boundary: BoundarySpec = field(default_factory=BoundarySpec)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    time: TimeSpec = field(default_factory=TimeSpec)
    filter: FilterSpec = field(default_factory=FilterSpec)
    probes: ProbeSpec = field(default_factory=ProbeSpec)
    run: RunSpec = field(default_factory=RunSpec)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """sha256 of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()

    def replace(self, **sections) -> "SimConfig":
        """Deep copy with selected fields overridden, e.g. replace(boundary={'inflow': 'modified'})."""
        new = copy.deepcopy(self)
        for name, values in sections.items():
            target = getattr(new, name)
            for key, value in values.items():
                if not hasattr(target, key):
                    raise ConfigError(f"unknown field {name}.{key}")
                setattr(target, key, value)
        validate(new)
        return new


_SECTIONS = {
    "grid": GridSpec, "flow": FlowSpec, "boundary": BoundarySpec, "pulse": PulseSpec,
    "time": TimeSpec, "filter": FilterSpec, "probes": ProbeSpec, "run": RunSpec,
}
_TUPLES = {("grid", "shape"), ("grid", "offset"), ("flow", "velocity"), ("probes", "planes")}


def from_dict(data: dict) -> SimConfig:
    """Build a config, rejecting unknown sections and fields."""
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    parts = {}
    for name, cls in _SECTIONS.items():
        raw = dict(data.get(name, {}))
        known = set(cls.__dataclass_fields__)
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown fields in [{name}]: {sorted(extra)}")
        for key in list(raw):
            if (name, key) in _TUPLES:
                raw[key] = tuple(raw[key])
        parts[name] = cls(**raw)
    cfg = SimConfig(**parts)
    validate(cfg)
    return cfg


def load(path) -> SimConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = from_dict(data)
    if cfg.grid.grid_file and not Path(cfg.grid.grid_file).is_absolute():
        cfg.grid.grid_file = str(Path(path).parent / cfg.grid.grid_file)
    return cfg


def validate(cfg: SimConfig) -> None:
    g = cfg.grid
    if len(g.shape) != 3 or any(int(n) < 1 for n in g.shape):
        raise ConfigError("grid.shape must be three positive integers")
    g.shape = tuple(int(n) for n in g.shape)
    if not cfg.boundary.periodic_xi and g.shape[0] < 8:
        raise ConfigError("non-periodic xi needs at least 8 nodes")
    if len(cfg.flow.velocity) != 3:
        raise ConfigError("flow.velocity must have three components")
    b = cfg.boundary
    for face in ("inflow", "outflow"):
        if getattr(b, face) not in FACE_VARIANTS:
            raise ConfigError(f"boundary.{face} must be one of {FACE_VARIANTS}")
    if b.outflow == "modified":
        raise ConfigError("the modified conditions are inflow-only")
    if b.modified_form not in ("norms", "exact"):
        raise ConfigError("boundary.modified_form must be 'norms' or 'exact'")
    p = cfg.pulse
    if p.type not in PULSE_TYPES:
        raise ConfigError(f"pulse.type must be one of {PULSE_TYPES}")
    if p.direction not in DIRECTIONS:
        raise ConfigError(f"pulse.direction must be one of {DIRECTIONS}")
    if p.width <= 0:
        raise ConfigError("pulse.width must be positive")
    if not 0.0 <= p.angle_deg < 90.0:
        raise ConfigError("pulse.angle_deg must lie in [0, 90)")
    if p.angle_deg > 0 and p.eta_modes == 0:
        raise ConfigError("an oblique pulse needs pulse.eta_modes > 0")
    if cfg.time.dt <= 0 or cfg.time.n_steps < 0:
        raise ConfigError("time.dt must be positive and time.n_steps nonnegative")
    if not 0.0 <= cfg.filter.strength <= 1.0:
        raise ConfigError("filter.strength must lie in [0, 1]")
    cfg.probes.planes = tuple(int(i) for i in cfg.probes.planes)
    for i in cfg.probes.planes:
        if not 0 <= i < g.shape[0]:
            raise ConfigError(f"probe plane {i} outside the grid")
