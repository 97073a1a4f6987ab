import math

import numpy as np
import pytest

from curvibc.errors import ConfigError
from curvibc.lee_sim.config import PulseSpec
from curvibc.lee_sim.pulse import envelope, incidence_angle, initial_field, solve_k_xi
from curvibc.metrics import analytic_mapping


def test_envelope_half_width():
    assert envelope(10.0, 10.0, 4.0) == 1.0
    assert envelope(14.0, 10.0, 4.0) == pytest.approx(0.5)


@pytest.mark.parametrize("angle", [15.0, 30.0, 45.0])
def test_angle_cartesian(angle):
    k_eta = 2 * math.pi * 2 / 32
    k_xi = solve_k_xi(np.eye(3), k_eta, angle)
    assert math.degrees(math.atan2(k_eta, k_xi)) == pytest.approx(angle, abs=1e-10)


def test_angle_sheared():
    mat = np.eye(3)
    mat[1, 0] = 0.3
    k_xi = solve_k_xi(mat, 0.4, 30.0)
    assert incidence_angle(mat, k_xi, 0.4) == pytest.approx(30.0, abs=1e-9)


def test_angle_needs_eta_wavenumber():
    with pytest.raises(ConfigError):
        solve_k_xi(np.eye(3), 0.0, 30.0)


def _field(spec, shape=(32, 8, 4), mapping="identity", params=None):
    f = analytic_mapping(mapping, params, shape)
    return f, initial_field(spec, f, (0.3, 0, 0), rng=np.random.default_rng(0))


def test_entropy_pulse_density_only():
    _, q = _field(PulseSpec(type="entropy", center=16, width=4))
    assert q[0].max() == pytest.approx(1e-3)
    assert not q[1:].any()


def test_vorticity_pulse_divergence_free():
    f, q = _field(PulseSpec(type="vorticity", center=16, width=4, eta_modes=1), mapping="sheared",
                  params={"eta_x": 0.3})
    assert not q[0].any() and not q[4].any()
    # velocity is normal to grad(xi) and grad(eta), so only zeta-derivatives could add divergence
    u = q[1:4]
    np.testing.assert_allclose(np.einsum("aijk,aijk->ijk", u, f.components[0]), 0, atol=1e-18)
    np.testing.assert_allclose(np.einsum("aijk,aijk->ijk", u, f.components[1]), 0, atol=1e-18)


@pytest.mark.parametrize("direction, sign", [("downstream", 1), ("upstream", -1)])
def test_directed_acoustic_pulse(direction, sign):
    _, q = _field(PulseSpec(direction=direction, center=16, width=4))
    np.testing.assert_array_equal(q[0], q[4])
    np.testing.assert_allclose(q[1], sign * q[4])


def test_noise_is_seeded():
    spec = PulseSpec(noise=0.1)
    f = analytic_mapping("identity", None, (16, 4, 4))
    a = initial_field(spec, f, (0.3, 0, 0), rng=np.random.Generator(np.random.PCG64(5)))
    b = initial_field(spec, f, (0.3, 0, 0), rng=np.random.Generator(np.random.PCG64(5)))
    np.testing.assert_array_equal(a, b)


def test_offset_shifts_center():
    spec = PulseSpec(center=20, width=3)
    f = analytic_mapping("identity", None, (40, 1, 1), offset=(-10, 0, 0))
    q = initial_field(spec, f, (0.3, 0, 0), xi_offset=-10)
    assert np.argmax(q[4, :, 0, 0]) == 30
