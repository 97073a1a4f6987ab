import numpy as np

from curvibc.metrics import compute_norms, contravariant, is_orthogonal
from curvibc.sampling import LAMBDA_MAX, MACH_RANGE, samples


def test_reproducible():
    a, b = samples(3, 5), samples(3, 5)
    assert a == b
    assert samples(4, 5) != a


def test_ranges():
    for s in samples(0, 300):
        sv = np.linalg.svd(s.metric.as_matrix(), compute_uv=False)
        assert sv[0] / sv[-1] <= 10.0
        nx = compute_norms(s.metric).norm_xi
        U = contravariant(s.metric, s.flow)[0]
        assert MACH_RANGE[0] <= U / nx <= MACH_RANGE[1] + 1e-12
        assert np.linalg.norm(s.flow.velocity) < 1.0
        assert abs(s.lp[0]) ** 2 + abs(s.lp[1]) ** 2 <= LAMBDA_MAX**2 + 1e-15


def test_orthogonal_option():
    assert all(is_orthogonal(s.metric, 1e-10) for s in samples(1, 30, orthogonal=True))
