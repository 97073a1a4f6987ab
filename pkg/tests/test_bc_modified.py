import numpy as np
import pytest
from hypothesis import given

from curvibc.bc_modified import (build_modified, check_locus, compute_m, modified_critical_matrix, modified_v4,
                                 product_v4_u5, reflection_coefficients, s_star_series_error)
from curvibc.bc_quasi3d import assemble, build_quasi3d, taylor_v_left
from curvibc.dispersion import LambdaPair
from curvibc.errors import DegenerateDenominator
from curvibc.metrics import MeanFlow, Metric, compute_norms, contravariant
from curvibc.wellposedness import illposed_frequency, moving_frame
from strategies import samples

SHEARED = Metric(1, 0, 0, 0.1, 1, 0, 0, 0, 1)


@pytest.mark.parametrize("u", [0.1, 0.5, 0.8])
def test_cartesian_limit(cart, u):
    c = compute_m(cart, MeanFlow(u))
    assert c.m1 == c.m2 == -(u + 1) / 2
    assert (c.A1, c.A2, c.A3) == (0.0, 0.0, 0.0)
    assert c.path == "limit"


def test_sheared_hand_value():
    c = compute_m(SHEARED, MeanFlow(0.5))
    assert c.m1 == pytest.approx(-0.5 * 1.5 * 1.01, rel=1e-14)
    assert c.path == "general"
    # projected weights remove the xi.eta part of |eta|^2
    assert compute_m(SHEARED, MeanFlow(0.5), form="exact").m1 == pytest.approx(-0.75, rel=1e-14)


@given(samples())
def test_a1_a3_vanish(s):
    for form in ("norms", "exact"):
        c = compute_m(s.metric, s.flow, form)
        n = compute_norms(s.metric)
        U = contravariant(s.metric, s.flow)[0]
        scale = max(1.0, 0.5 * (U + n.norm_xi) * max(n.norm_eta, n.norm_zeta) ** 2)
        assert abs(c.A1) <= 1e-14 * scale and abs(c.A3) <= 1e-14 * scale


def test_reflection_coefficients_unmodified_cartesian(cart, flow05):
    A1, A2, A3 = reflection_coefficients(cart, flow05, 0.0, 0.0)
    assert A1 == A3 == -0.75 and A2 == 0


def test_modified_v4_zero_lambda(draws):
    for s in draws[:20]:
        v0, _, _ = taylor_v_left(4, s.metric, s.flow)
        np.testing.assert_array_equal(modified_v4(s.metric, s.flow, LambdaPair(0, 0)), v0)


def test_modified_v4_vorticity_injection(cart, flow05):
    v = modified_v4(cart, flow05, LambdaPair(0.1, 0))
    # xi_y + lambda1 U eta_y + lambda1 m1 xi_x
    assert v[2] == pytest.approx(0.1 * 0.5 + 0.1 * -0.75)


def _product_gap(s, form, eps=1e-3):
    c = compute_m(s.metric, s.flow, form)
    small = LambdaPair(eps * 0.6, eps * -0.8)
    direct, predicted = product_v4_u5(s.metric, s.flow, small, c)
    U = contravariant(s.metric, s.flow)[0]
    nx = compute_norms(s.metric).norm_xi
    assert predicted == pytest.approx((U - nx) / (2 * nx**2) * c.A2 * small[0] * small[1], rel=1e-12, abs=1e-300)
    return abs(direct - predicted)


def test_product_only_cross_term(draws, ortho_draws):
    # the projected weights are the true quadratic coefficients on any metric
    for s in draws[:40]:
        assert _product_gap(s, "exact") <= 1e-7
    for s in ortho_draws:
        assert _product_gap(s, "norms") <= 1e-7


def test_norm_weights_miss_quadratic_on_skewed_grid(draws):
    s = draws[0]
    assert _product_gap(s, "norms") > 1e3 * _product_gap(s, "exact")


def test_product_vanishes_cartesian(cart, flow05):
    direct, predicted = product_v4_u5(cart, flow05, LambdaPair(0.01, 0.02))
    assert predicted == 0
    assert abs(direct) < 1e-5


def test_zero_coefficients_match_quasi3d(draws):
    for s in draws[:10]:
        a = assemble(s.metric, s.flow, "inflow", variant="modified")
        b = build_quasi3d(s.metric, s.flow, "inflow")
        for x, y in ((a.time_rows, b.time_rows), (a.G, b.G), (a.H, b.H)):
            np.testing.assert_array_equal(x, y)


def test_cartesian_modified_row(cart):
    u, v, w = 0.5, 0.1, 0.2
    op = build_modified(cart, MeanFlow(u, v, w))
    m1 = m2 = -(u + 1) / 2
    np.testing.assert_allclose(op.G[3], [0, v, -u - m1, 0, v], atol=1e-15)
    np.testing.assert_allclose(op.H[3], [0, w, 0, -u - m2, w], atol=1e-15)
    q3 = build_quasi3d(cart, MeanFlow(u, v, w), "inflow")
    np.testing.assert_array_equal(op.G[:3], q3.G[:3])


def test_locus_rank_four(ortho_draws):
    for s in ortho_draws:
        flow = moving_frame(s.flow, s.metric)
        jordan = check_locus(s.metric, flow, 0.7, -0.4)
        assert jordan.rank == 4 and not jordan.illposed
        w = illposed_frequency(s.metric, flow, 0.7, -0.4)
        plain = modified_critical_matrix(s.metric, flow, LambdaPair(0.7 / w, -0.4 / w), w)
        assert plain.rank() == 3


def test_series_error_bound(ortho_draws):
    gam = np.geomspace(1e-4, 1e-2, 9)
    for s in ortho_draws:
        assert np.all(s_star_series_error(s.metric, s.flow, gam) <= 1.5)


def test_degenerate_denominator():
    m = Metric(0, 1, 0, 0, 1, 1, 1, 0, 1)
    with pytest.raises(DegenerateDenominator):
        compute_m(m, MeanFlow(0, 0.5, 0))
