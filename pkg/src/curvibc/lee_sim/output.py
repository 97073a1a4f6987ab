"""Run directory layout: per-probe CSV histories, full planes, JSON summary."""
from __future__ import annotations

import csv
import datetime
import json
import os
from pathlib import Path

import numpy as np

from .solver import RunResult

CSV_COLUMNS = ("t", "rho", "u", "v", "w", "p")


def write_probe_csv(path, times, plane: np.ndarray) -> None:
    """History of the plane-center node; ``plane`` has shape (n_t, 5, nj, nk)."""
    j, k = plane.shape[2] // 2, plane.shape[3] // 2
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for n, t in enumerate(times):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in plane[n, :, j, k]])


def summary(result: RunResult, reflection=None, extra: dict | None = None) -> dict:
    """Deterministic summary; everything that varies between identical runs sits in ``metadata``."""
    cfg = result.config
    out = {
        "name": cfg.run.name,
        "config": cfg.to_dict(),
        "config_hash": cfg.digest(),
        "steps": int(len(result.times) - 1),
        "final_time": float(result.times[-1]),
        "energy_initial": float(result.energy[0]),
        "energy_final": float(result.energy[-1]),
        "probe_planes": [int(i) for i in result.probes],
        "reflection": reflection.as_dict() if reflection is not None else None,
        "metadata": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_time_s": result.wall_time,
            "backend": result.backend,
        },
    }
    if extra:
        out.update(extra)
    return out


def write_run(result: RunResult, outdir, reflection=None, extra: dict | None = None) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, plane in result.probes.items():
        write_probe_csv(outdir / f"probe_i{i:04d}.csv", result.times, plane)
    np.savez(outdir / "probes.npz", times=result.times, energy=result.energy,
             **{f"plane_{i:04d}": plane for i, plane in result.probes.items()})
    data = summary(result, reflection, extra)
    tmp = outdir / "summary.json.tmp"
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True, default=list) + "\n")
    os.replace(tmp, outdir / "summary.json")
    return outdir


def read_summary(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "summary.json"
    return json.loads(path.read_text())
