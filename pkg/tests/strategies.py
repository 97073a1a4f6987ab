"""Hypothesis strategies for metrics, flows and lambda pairs."""
import numpy as np
from hypothesis import strategies as st

from curvibc.dispersion import LambdaPair
from curvibc.metrics import MeanFlow, Metric
from curvibc.sampling import draw, make_rng

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def samples(draw_, orthogonal=False):
    return draw(make_rng(draw_(seeds)), orthogonal=orthogonal)


@st.composite
def metrics(draw_):
    return draw(make_rng(draw_(seeds))).metric


def small_lambda(max_abs=0.3):
    c = st.floats(-max_abs / 1.5, max_abs / 1.5, allow_nan=False)
    return st.builds(lambda a, b: LambdaPair(complex(a), complex(b)), c, c)


@st.composite
def subsonic_cartesian_flows(draw_):
    u = draw_(st.floats(0.05, 0.9))
    r = np.sqrt(1 - u * u) * 0.9
    v = draw_(st.floats(-r / 1.5, r / 1.5))
    w = draw_(st.floats(-r / 1.5, r / 1.5))
    return MeanFlow(u, v, w)


def cartesian():
    return st.just(Metric.cartesian())
