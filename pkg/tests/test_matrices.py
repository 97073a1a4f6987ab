import numpy as np
import pytest

from curvibc.errors import DimensionalModeUnsupported
from curvibc.matrices import (DispersionMatrix, WaveVector, build_cartesian, build_curvilinear,
                              dispersion_determinant, dispersion_matrix)
from curvibc.metrics import MeanFlow, Metric, contravariant


def test_zero_flow_sparsity():
    a, b, c = build_cartesian(MeanFlow())
    want = np.zeros((5, 5))
    want[0, 1] = want[1, 4] = want[4, 1] = 1.0
    np.testing.assert_array_equal(a, want)
    for mat in (a, b, c):
        assert np.count_nonzero(mat) == 3


def test_cartesian_u_half():
    a, b, c = build_cartesian(MeanFlow(0.5, 0.1, 0.2))
    np.testing.assert_array_equal(np.diag(a), [0.5] * 5)
    np.testing.assert_array_equal(np.diag(b), [0.1] * 5)
    np.testing.assert_array_equal(np.diag(c), [0.2] * 5)
    for mat, d in zip((a, b, c), (1, 2, 3)):
        assert mat[0, d] == mat[d, 4] == mat[4, d] == 1.0
        assert np.count_nonzero(mat) == 8


def test_dimensional_rejected():
    with pytest.raises(DimensionalModeUnsupported):
        build_cartesian(MeanFlow(0.5, rho_bar=2.0, dimensional=True))


def test_curvilinear_cartesian_reduces(cart):
    flow = MeanFlow(0.4, -0.1, 0.2)
    for got, want in zip(build_curvilinear(cart, flow), build_cartesian(flow)):
        np.testing.assert_array_equal(got, want)


def test_hand_evaluated_entries():
    m = Metric(3, 4, 0, 0, 1, 0, 0, 0, 1)
    at, _, _ = build_curvilinear(m, MeanFlow(1.0, 2.0, 0.0))
    assert at[0, 0] == 11.0
    assert at[0, 1] == 3.0
    assert at[0, 2] == 4.0


def test_combination_matches_closed_form(draws):
    for s in draws:
        cartesian = build_cartesian(s.flow)
        for row, got in zip(s.metric.as_matrix(), build_curvilinear(s.metric, s.flow)):
            combo = sum(r * a for r, a in zip(row, cartesian))
            np.testing.assert_allclose(got, combo, rtol=0, atol=1e-14 * max(1, np.abs(combo).max()))


def test_zero_wave_gives_zero_matrix(draws):
    d = dispersion_matrix(draws[0].metric, draws[0].flow, WaveVector(0, 0, 0, 0))
    assert not d.matrix.any()


def test_one_dimensional_entropy_point(cart):
    d = dispersion_matrix(cart, MeanFlow(0.5), WaveVector(1, 0, 0, 0.5))
    assert d.beta == 0
    np.testing.assert_array_equal(d.alpha, [1, 0, 0])


def test_dense_assembly_oracle(draws):
    rng = np.random.default_rng(3)
    for s in draws[:50]:
        k, l, mw, w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        at, bt, ct = build_curvilinear(s.metric, s.flow)
        want = np.zeros((5, 5), dtype=complex)
        for i in range(5):
            for j in range(5):
                want[i, j] = k * at[i, j] + l * bt[i, j] + mw * ct[i, j] - (w if i == j else 0)
        got = dispersion_matrix(s.metric, s.flow, WaveVector(k, l, mw, w)).matrix
        np.testing.assert_allclose(got, want, rtol=0, atol=4e-16 * np.abs(want).max())


@pytest.mark.parametrize("alpha, want", [((0, 0, 0), 1), ((1, 0, 0), 0)])
def test_determinant_simple(alpha, want):
    d = DispersionMatrix(np.eye(5), 1.0, *alpha)
    assert dispersion_determinant(d) == want


def test_determinant_against_lu(draws):
    rng = np.random.default_rng(5)
    worst = 0.0
    for s in draws:
        for _ in range(5):
            k, l, mw, w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            d = dispersion_matrix(s.metric, s.flow, WaveVector(k, l, mw, w))
            num = np.linalg.det(d.matrix)
            scale = max(abs(d.beta), np.linalg.norm(d.alpha)) ** 5
            worst = max(worst, abs(dispersion_determinant(d) - num) / scale)
    assert worst <= 1e-10


def test_beta_is_advective_part(draws):
    s = draws[0]
    U, V, W = contravariant(s.metric, s.flow)
    d = dispersion_matrix(s.metric, s.flow, WaveVector(0.3, 0.2, -0.1, 0.7))
    assert d.beta == pytest.approx(0.3 * U + 0.2 * V - 0.1 * W - 0.7)
