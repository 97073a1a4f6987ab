import numpy as np
import pytest

from curvibc.dispersion import LambdaPair
from curvibc.eigenvectors import right_eigenvector
from curvibc.errors import NonOrthogonalGrid
from curvibc.metrics import MeanFlow, Metric, contravariant
from curvibc.bc_quasi3d import taylor_v_left
from curvibc.wellposedness import (closed_form_inflow, critical_matrix_inflow, detect_illposed_inflow,
                                   determinant_scan, illposed_frequency, moving_frame, numeric_rank,
                                   outflow_scalar, outflow_wellposed_check)


def test_moving_frame(cart):
    assert moving_frame(MeanFlow(0.5), cart) == MeanFlow(0.5)
    f = moving_frame(MeanFlow(0.5, 0.2, 0.1), cart)
    np.testing.assert_allclose(f.velocity, [0.5, 0, 0])


def test_moving_frame_keeps_normal_velocity(draws):
    for s in draws[:20]:
        f = moving_frame(s.flow, s.metric)
        U, V, W = contravariant(s.metric, f)
        assert U == pytest.approx(contravariant(s.metric, s.flow)[0], rel=1e-13)
        assert abs(V) < 1e-13 and abs(W) < 1e-13


def test_frame_required(cart):
    with pytest.raises(ValueError):
        critical_matrix_inflow(cart, MeanFlow(0.5, 0.2), LambdaPair(0.1, 0))


def test_zero_lambda_is_identity(cart, flow05):
    c = critical_matrix_inflow(cart, flow05, LambdaPair(0, 0))
    np.testing.assert_allclose(c.entries, np.eye(4), atol=1e-15)


def test_closed_form_against_products(ortho_draws):
    rng = np.random.default_rng(8)
    for s in ortho_draws:
        flow = moving_frame(s.flow, s.metric)
        lp = LambdaPair(*(0.2 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))))
        rows = []
        for n in range(1, 5):
            v0, d1, d2 = taylor_v_left(n, s.metric, flow)
            rows.append(v0 + lp[0] * d1 + lp[1] * d2)
        cols = np.array([right_eigenvector(n, s.metric, flow, lp) for n in range(1, 5)]).T
        want = np.array(rows) @ cols
        np.testing.assert_allclose(closed_form_inflow(s.metric, flow, lp), want, rtol=0,
                                   atol=1e-12 * max(1, np.abs(want).max()))


def test_cartesian_illposed_example(cart, flow05):
    f = detect_illposed_inflow(cart, flow05, 1.0, 0.0)
    assert f.omega == pytest.approx(0.5j)
    assert f.rank == 2 and f.illposed


def test_no_mode_without_tangential_wavenumber(cart, flow05):
    f = detect_illposed_inflow(cart, flow05, 0.0, 0.0)
    assert not f.illposed and f.message.startswith("none")


def test_locus_rank_two_and_coalescence(ortho_draws):
    for s in ortho_draws:
        flow = moving_frame(s.flow, s.metric)
        f = detect_illposed_inflow(s.metric, flow, 0.7, -0.4)
        assert f.rank == 2
        U = contravariant(s.metric, flow)[0]
        assert abs(f.k3_star - 1 / U) <= 1e-10 * max(1, 1 / U)
        assert abs(f.k4_star - 1 / U) <= 1e-10 * max(1, 1 / U)


def test_determinant_scan_minimum_at_locus():
    m = Metric(2, 0, 0, 0, 3, 0, 0, 0, 4)
    flow = MeanFlow(0.3)
    w = illposed_frequency(m, flow, 0.5, 0.25)
    assert w == pytest.approx(1j * 0.6 * np.hypot(1.5, 1.0) / 2)
    re, im, det = determinant_scan(m, flow, 0.5, 0.25, w, n=50)
    a, b = np.unravel_index(np.argmin(det), det.shape)
    assert abs(complex(re[b], im[a]) - w) <= 2 * (re[1] - re[0])
    assert det.min() <= 1e-3 * det.max()


def test_outflow_sweep_cartesian(cart, flow05):
    res = outflow_wellposed_check(cart, flow05, n=50)
    assert res["wellposed"] and res["min_abs_scalar"] > 0.01
    assert res["samples"] == 2500


def test_outflow_scalar_one_dimensional(ortho_draws):
    for s in ortho_draws:
        flow = moving_frame(s.flow, s.metric)
        assert outflow_scalar(s.metric, flow, LambdaPair(0, 0)) == pytest.approx(1.0, abs=1e-13)


def test_nonorthogonal_rejected():
    m = Metric(1, 0, 0, 0.3, 1, 0, 0, 0, 1)
    with pytest.raises(NonOrthogonalGrid):
        detect_illposed_inflow(m, MeanFlow(0.5), 1.0, 0.0)


def test_numeric_rank():
    assert numeric_rank(np.diag([1.0, 1e-3, 0.0])) == 2
    assert numeric_rank(np.zeros((3, 3))) == 0
