"""Seeded random samples of metrics, mean flows and lambda pairs.

All randomness goes through ``numpy.random.Generator(PCG64(seed))`` so a
seed fixes every sample on every platform numpy supports.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import LambdaPair
from .metrics import MeanFlow, Metric

GENERATOR = "numpy.random.Generator(PCG64)"
SINGULAR_RANGE = (0.5, 5.0)
MACH_RANGE = (0.1, 0.8)
LAMBDA_MAX = 0.3
OMEGA_RANGE = (0.5, 2.0)


@dataclass(frozen=True)
class Sample:
    metric: Metric
    flow: MeanFlow
    lp: LambdaPair
    omega: float


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


def random_metric(rng: np.random.Generator, orthogonal: bool = False) -> Metric:
    """Metric with singular values in SINGULAR_RANGE, so its condition number is at most 10.

    ``orthogonal=True`` gives mutually orthogonal rows (an orthogonal grid).
    """
    s = rng.uniform(*SINGULAR_RANGE, size=3)
    if orthogonal:
        return Metric.from_matrix(np.diag(s) @ random_rotation(rng))
    return Metric.from_matrix(random_rotation(rng) @ np.diag(s) @ random_rotation(rng))


def random_flow(rng: np.random.Generator, m: Metric) -> MeanFlow:
    """Subsonic flow with U / |xi| in MACH_RANGE and a random tangential part."""
    nx = np.linalg.norm(m.xi)
    n = m.xi / nx
    a = rng.uniform(*MACH_RANGE)
    t = rng.standard_normal(3)
    t -= (t @ n) * n
    t /= np.linalg.norm(t)
    b = rng.uniform(0.0, 0.9) * np.sqrt(1.0 - a * a)
    return MeanFlow(*(a * n + b * t))


def random_lambda(rng: np.random.Generator, max_abs: float = LAMBDA_MAX) -> LambdaPair:
    """Real lambda pair uniform in the disc of radius ``max_abs``."""
    r = max_abs * np.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2 * np.pi)
    return LambdaPair(complex(r * np.cos(th)), complex(r * np.sin(th)))


def draw(rng: np.random.Generator, metric: Metric | None = None, orthogonal: bool = False) -> Sample:
    m = metric if metric is not None else random_metric(rng, orthogonal)
    return Sample(m, random_flow(rng, m), random_lambda(rng), float(rng.uniform(*OMEGA_RANGE)))


def samples(seed: int, n: int, metric: Metric | None = None, orthogonal: bool = False) -> list:
    rng = make_rng(seed)
    return [draw(rng, metric, orthogonal) for _ in range(n)]
