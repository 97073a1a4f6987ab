import numpy as np
import pytest
from hypothesis import given

from curvibc.dispersion import LambdaPair, k_star
from curvibc.eigenvectors import left_eigenvector, limit_vectors, mode, right_eigenvector, v_left
from curvibc.errors import DegenerateNormalization, DimensionalModeUnsupported
from curvibc.matrices import WaveVector, dispersion_matrix
from curvibc.metrics import MeanFlow, Metric, compute_norms, contravariant
from strategies import samples, small_lambda

ZERO = LambdaPair(0, 0)
CART_TO_CHAR = np.array([[-1, 0, 0, 0, 1], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 1, 0, 0, 1], [0, -1, 0, 0, 1]])


def at_root(n, s, lp):
    w = s.omega
    k = k_star(n, s.metric, s.flow, lp, w) * w
    return dispersion_matrix(s.metric, s.flow, WaveVector(k, lp[0] * w, lp[1] * w, w)).matrix


def test_entropy_right_vector(draws):
    for s in draws[:10]:
        nx = compute_norms(s.metric).norm_xi
        np.testing.assert_allclose(right_eigenvector(1, s.metric, s.flow, s.lp), [-1 / nx, 0, 0, 0, 0])


def test_downstream_acoustic_cartesian(cart, flow05):
    np.testing.assert_allclose(right_eigenvector(4, cart, flow05, ZERO), [0.5, 0.5, 0, 0, 0.5], rtol=1e-15)


def test_entropy_left_vector_is_entropy(draws):
    rng = np.random.default_rng(0)
    for s in draws[:10]:
        nx = compute_norms(s.metric).norm_xi
        left = left_eigenvector(1, s.metric, s.flow, s.lp)
        np.testing.assert_allclose(left, [-nx, 0, 0, 0, nx])
        q = rng.standard_normal(5)
        assert left @ q == pytest.approx(nx * (q[4] - q[0]))


@pytest.mark.parametrize("n", range(1, 6))
def test_kernel_residuals(draws, n):
    for s in draws:
        M = at_root(n, s, s.lp)
        r = right_eigenvector(n, s.metric, s.flow, s.lp, s.omega)
        left = left_eigenvector(n, s.metric, s.flow, s.lp, s.omega)
        norm = np.linalg.norm(M, 2)
        assert np.linalg.norm(M @ r) <= 1e-10 * norm * np.linalg.norm(r)
        assert np.linalg.norm(left @ M) <= 1e-10 * norm * np.linalg.norm(left)


def test_biorthonormal_at_zero_lambda(draws):
    for s in draws:
        R = np.array([right_eigenvector(n, s.metric, s.flow, ZERO) for n in range(1, 6)]).T
        L = np.array([left_eigenvector(n, s.metric, s.flow, ZERO) for n in range(1, 6)])
        P = L @ R
        np.testing.assert_allclose(np.diag(P), 1.0, atol=1e-12)
        for i in range(5):
            for j in range(5):
                if i != j and (i in (0, 3, 4) or j in (0, 3, 4)):
                    assert abs(P[i, j]) <= 1e-12
        m = s.metric
        assert P[1, 2] == pytest.approx(m.xi_y * m.xi_z / compute_norms(m).psi3**2, abs=1e-12)


def test_v_left_entropy_equals_left(draws):
    for s in draws[:10]:
        np.testing.assert_array_equal(v_left(1, s.metric, s.flow, s.lp), left_eigenvector(1, s.metric, s.flow, s.lp))


def test_v_left_downstream_cartesian(cart, flow05):
    np.testing.assert_allclose(v_left(4, cart, flow05, ZERO), [0, 1, 0, 0, 1], atol=1e-15)


@given(samples(), small_lambda())
def test_v_left_product_form(s, lp):
    at = dispersion_matrix(s.metric, s.flow, WaveVector(1, 0, 0, 0)).matrix
    U = contravariant(s.metric, s.flow)[0]
    nx = compute_norms(s.metric).norm_xi
    lim = {1: 1 / U, 2: 1 / U, 3: 1 / U, 4: 1 / (U + nx), 5: 1 / (U - nx)}
    for n in range(1, 6):
        want = lim[n] * left_eigenvector(n, s.metric, s.flow, lp) @ at
        got = v_left(n, s.metric, s.flow, lp)
        assert np.max(np.abs(got - want)) <= 1e-13 * max(1.0, np.max(np.abs(want)))


def test_limit_vectors_cartesian(cart):
    wR, wL = limit_vectors(cart)
    np.testing.assert_array_equal(wL, CART_TO_CHAR)
    np.testing.assert_array_equal(wR @ wL, np.eye(5))


def test_limit_vectors_random(draws):
    for s in draws[:50]:
        wR, wL = limit_vectors(s.metric)
        assert wL[3] @ wR[:, 3] == pytest.approx(1.0, abs=1e-14)
        assert abs(wL[0] @ wR[:, 4]) <= 1e-15


def test_degenerate_normalization():
    m = Metric(0, 0, 1, 1, 0, 0, 0, 1, 0)
    with pytest.raises(DegenerateNormalization):
        right_eigenvector(2, m, MeanFlow(0, 0, 0.3), ZERO)


def test_dimensional_flow_rejected(cart):
    with pytest.raises(DimensionalModeUnsupported):
        right_eigenvector(4, cart, MeanFlow(100.0, rho_bar=1.2, c_bar=340.0, dimensional=True), ZERO)


def test_mode_bundle(cart, flow05):
    md = mode(5, cart, flow05, ZERO)
    assert md.kind == "acoustic_up"
    assert md.k_star == pytest.approx(-2)
