import numpy as np
import pytest
from hypothesis import given

from curvibc.dispersion import (KINDS, LambdaPair, group_velocity_acoustic, k_star, roots_k, roots_omega,
                                s_star)
from curvibc.errors import CriticalStreamwise, SonicDegenerate
from curvibc.matrices import WaveVector, build_curvilinear, dispersion_determinant, dispersion_matrix
from curvibc.metrics import MeanFlow, Metric, compute_norms, contravariant
from strategies import samples, small_lambda


def numeric_k(m, flow, l, mw, omega):
    """Eigenvalues k of A^{-1} (omega I - l B - m C)."""
    at, bt, ct = build_curvilinear(m, flow)
    rhs = omega * np.eye(5) - l * bt - mw * ct
    return np.linalg.eigvals(np.linalg.solve(at, rhs))


def matched_error(closed, numeric):
    numeric = list(numeric)
    worst = 0.0
    for k in closed:
        j = int(np.argmin([abs(k - z) for z in numeric]))
        worst = max(worst, abs(k - numeric.pop(j)))
    return worst / max(1.0, np.max(np.abs(closed)))


def test_cartesian_table(cart, flow05):
    r = roots_k(cart, flow05, 0, 0, 1)
    np.testing.assert_allclose(r.k, [2, 2, 2, 2 / 3, -2], rtol=1e-15)
    assert r.kinds == KINDS
    assert r.directions[3] == ("incoming", "outgoing")
    assert r.directions[4] == ("outgoing", "incoming")


def test_zero_frequency(cart, flow05):
    assert not roots_k(cart, flow05, 0, 0, 0).k.any()


def test_roots_against_eigenvalues(draws):
    rng = np.random.default_rng(1)
    for s in draws:
        l, mw = (s.lp[0] * s.omega).real, (s.lp[1] * s.omega).real
        got = roots_k(s.metric, s.flow, l, mw, s.omega).k
        assert matched_error(got, numeric_k(s.metric, s.flow, l, mw, s.omega)) <= 1e-9
        # complex frequencies too
        w = s.omega * (1 + 0.3j * rng.standard_normal())
        got = roots_k(s.metric, s.flow, l, mw, w).k
        assert matched_error(got, numeric_k(s.metric, s.flow, l, mw, w)) <= 1e-9


@given(samples())
def test_triple_root_and_determinant(s):
    l, mw = (s.lp[0] * s.omega).real, (s.lp[1] * s.omega).real
    r = roots_k(s.metric, s.flow, l, mw, s.omega)
    assert r.k[0] == r.k[1] == r.k[2]
    for k in r.k:
        d = dispersion_matrix(s.metric, s.flow, WaveVector(k, l, mw, s.omega))
        scale = max(abs(d.beta), np.linalg.norm(d.alpha), 1.0) ** 5
        assert abs(dispersion_determinant(d)) <= 1e-9 * scale


def test_sonic_and_streamwise_errors(cart):
    with pytest.raises(SonicDegenerate):
        roots_k(cart, MeanFlow(1.0), 0, 0, 1)
    with pytest.raises(CriticalStreamwise):
        roots_k(cart, MeanFlow(0.0, 0.3), 0, 0, 1)


def test_roots_omega_cartesian(cart, flow05):
    np.testing.assert_allclose(roots_omega(cart, flow05, 1, 0, 0), [0.5, 0.5, 0.5, 1.5, -0.5])
    assert not roots_omega(cart, flow05, 0, 0, 0).any()


def test_roots_omega_annihilate_determinant(draws):
    for s in draws[:50]:
        for w in roots_omega(s.metric, s.flow, 0.7, 0.2, -0.3):
            d = dispersion_matrix(s.metric, s.flow, WaveVector(0.7, 0.2, -0.3, w))
            scale = max(abs(d.beta), np.linalg.norm(d.alpha), 1.0) ** 5
            assert abs(dispersion_determinant(d)) <= 1e-10 * scale


def test_group_velocity_normal_incidence(draws):
    for s in draws[:20]:
        U = contravariant(s.metric, s.flow)[0]
        nx = compute_norms(s.metric).norm_xi
        cg4, cg5 = group_velocity_acoustic(s.metric, s.flow, 0.8, 0, 0)
        assert cg4 == pytest.approx(U + nx, rel=1e-14)
        assert cg5 == pytest.approx(U - nx, rel=1e-14)


def test_group_velocity_cartesian(cart, flow05):
    np.testing.assert_allclose(group_velocity_acoustic(cart, flow05, 1, 0, 0), (1.5, -0.5))


def test_group_velocity_finite_difference(draws):
    h = 1e-6
    for s in draws[:50]:
        k, l, mw = 0.9, 0.3, -0.2
        fd = (roots_omega(s.metric, s.flow, k + h, l, mw) - roots_omega(s.metric, s.flow, k - h, l, mw)) / (2 * h)
        cg = group_velocity_acoustic(s.metric, s.flow, k, l, mw)
        np.testing.assert_allclose(cg, fd[3:], atol=1e-5)


def test_s_star_one_dimensional(draws, cart, flow05):
    for s in draws[:20]:
        U = contravariant(s.metric, s.flow)[0]
        nx = compute_norms(s.metric).norm_xi
        assert s_star(s.metric, s.flow, LambdaPair(0, 0)) == pytest.approx(nx / U, rel=1e-14)
    assert s_star(cart, flow05, LambdaPair(0, 0)) == 2.0


def test_k_star_limits(cart, flow05, draws):
    assert k_star(4, cart, flow05, LambdaPair(0, 0)) == pytest.approx(2 / 3)
    assert k_star(5, cart, flow05, LambdaPair(0, 0)) == pytest.approx(-2)
    for s in draws[:20]:
        U = contravariant(s.metric, s.flow)[0]
        nx = compute_norms(s.metric).norm_xi
        lp = LambdaPair(0, 0)
        assert k_star(4, s.metric, s.flow, lp).real == pytest.approx(1 / (U + nx), rel=1e-13)
        assert k_star(5, s.metric, s.flow, lp).real == pytest.approx(1 / (U - nx), rel=1e-13)


@given(samples(), small_lambda())
def test_k_star_consistent_with_roots(s, lp):
    w = s.omega
    r = roots_k(s.metric, s.flow, lp[0].real * w, lp[1].real * w, w)
    for n in (4, 5):
        assert abs(k_star(n, s.metric, s.flow, lp, w) * w - r.k[n - 1]) <= 1e-12 * max(1, abs(r.k[n - 1]))


def test_s_star_at_illposed_locus():
    m = Metric(2, 0, 0, 0, 3, 0, 0, 0, 4)
    flow = MeanFlow(0.5)
    U, nx = 1.0, 2.0
    theta = 3.0 * 0.4
    omega = 1j * U * theta / nx
    lp = LambdaPair(0.4 / omega, 0.0)
    gamma = lp[0] ** 2 * 9.0
    assert gamma == pytest.approx(-nx**2 / U**2)
    assert s_star(m, flow, lp, omega) == pytest.approx(nx**2 / U**2, rel=1e-13)
