import numpy as np
import pytest

from curvibc.bc_first_order import (apply_inflow_1d, apply_outflow_1d, build_transform, from_characteristics,
                                    inverse_deviation, to_characteristics)
from curvibc.errors import DimensionalModeUnsupported
from curvibc.metrics import MeanFlow, Metric

TO_CHAR = np.array([
    [-1, 0, 0, 0, 1],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 1, 0, 0, 1],
    [0, -1, 0, 0, 1],
], dtype=float)
FROM_CHAR = np.array([
    [-1, 0, 0, 0.5, 0.5],
    [0, 0, 0, 0.5, -0.5],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 0.5, 0.5],
])


def test_cartesian_matrices_exact(cart):
    t = build_transform(cart)
    np.testing.assert_array_equal(t.to_char, TO_CHAR)
    np.testing.assert_array_equal(t.from_char, FROM_CHAR)
    np.testing.assert_array_equal(t.from_char @ t.to_char, np.eye(5))


def test_to_characteristics(cart):
    t = build_transform(cart)
    assert to_characteristics(t, [0, 1, 0, 0, 1]) == (1, 0, 0, 2, 0)
    assert to_characteristics(t, np.zeros(5)) == (0, 0, 0, 0, 0)


def test_roundtrip_cartesian(cart):
    t = build_transform(cart)
    q = np.random.default_rng(4).standard_normal((20, 5))
    for row in q:
        np.testing.assert_allclose(from_characteristics(t, to_characteristics(t, row)), row, atol=1e-14)


def test_outflow_projection(cart):
    t = build_transform(cart)
    assert apply_outflow_1d(t, [0, 1, 0, 0, 1]) == (0, 1, 0, 0, 1)
    np.testing.assert_allclose(apply_outflow_1d(t, [0, 0, 0, 0, 1]), [-0.5, 0.5, 0, 0, 0.5])


def test_inflow_zeroes_incoming(draws):
    for s in draws[:30]:
        t = build_transform(s.metric, reconstruction="exact")
        q = apply_inflow_1d(t, np.arange(1.0, 6.0))
        np.testing.assert_allclose(to_characteristics(t, q)[:4], 0, atol=1e-12)


def test_projections_idempotent(draws):
    for s in draws[:30]:
        t = build_transform(s.metric, reconstruction="exact")
        q = np.random.default_rng(0).standard_normal(5)
        for f in (apply_inflow_1d, apply_outflow_1d):
            once = f(t, q)
            np.testing.assert_allclose(f(t, once), once, atol=1e-12)


def test_modal_inverse_only_without_cross_term():
    plain = Metric(0.8, 0.6, 0.0, 0, 1, 0, 0, 0, 1)
    assert inverse_deviation(build_transform(plain)) <= 1e-15
    crossed = Metric(0.8, 0.5, 0.3, 0, 1, 0, 0, 0, 1)
    dev = inverse_deviation(build_transform(crossed))
    assert dev > 1e-3
    assert inverse_deviation(build_transform(crossed, reconstruction="exact")) <= 1e-14


def test_dimensional_mode_scaling(cart):
    flow = MeanFlow(100.0, rho_bar=1.2, c_bar=340.0, dimensional=True)
    t = build_transform(cart, flow)
    assert t.mode == "dimensional"
    rc = 1.2 * 340.0
    # c5 = -rho c u' + p'
    np.testing.assert_allclose(t.to_char[4], [0, -rc, 0, 0, 1])
    np.testing.assert_allclose(t.from_char @ t.to_char, np.eye(5), atol=1e-12)
    with pytest.raises(DimensionalModeUnsupported):
        build_transform(cart, flow, mode="nondimensional")
