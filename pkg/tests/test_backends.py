"""The compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from cfinterp import _kernels, _pykernels

pytestmark = pytest.mark.skipif(
    "cython" not in _kernels.available_backends(), reason="compiled kernels not built"
)


@pytest.fixture
def ck():
    from cfinterp import _ckernels

    return _ckernels


def _batch(rng, m=50, n=5):
    b0 = rng.uniform(-2, 2, m)
    a = rng.uniform(-1, 1, (m, n))
    b = rng.uniform(2, 3, (m, n))
    return b0, a, b


def test_backward_agrees(ck, rng):
    b0, a, b = _batch(rng)
    b[3, 2] = 0.0
    a[3, 3] = 0.0  # makes floor 3's denominator exactly b_3 + 0 = 0
    v1, f1 = ck.backward_batch(b0, a, b, 1e-300)
    v2, f2 = _pykernels.backward_batch(b0, a, b, 1e-300)
    np.testing.assert_array_equal(f1, f2)
    assert f1[3] == 3
    np.testing.assert_allclose(v1, v2, rtol=0, atol=0, equal_nan=True)


def test_forward_agrees(ck, rng):
    b0, a, b = _batch(rng)
    for x, y in zip(ck.forward_batch(b0, a, b), _pykernels.forward_batch(b0, a, b)):
        np.testing.assert_array_equal(x, y)


def test_forward_derivative_agrees(ck, rng):
    b0, a, b = _batch(rng)
    db0, da, db = _batch(rng)
    out_c = ck.forward_deriv_batch(b0, a, b, db0, da, db)
    out_p = _pykernels.forward_deriv_batch(b0, a, b, db0, da, db)
    for x, y in zip(out_c, out_p):
        np.testing.assert_array_equal(x, y)


def test_cumulative_agrees(ck, rng):
    y = rng.normal(size=101)
    np.testing.assert_array_equal(ck.cumulative_quad(y, 0.01), _pykernels.cumulative_quad(y, 0.01))


def test_zero_depth(ck):
    b0 = np.array([1.5, -2.0])
    empty = np.zeros((2, 0))
    v, f = ck.backward_batch(b0, empty, empty, 1e-300)
    np.testing.assert_array_equal(v, b0)
    np.testing.assert_array_equal(f, [0, 0])


def test_set_backend_round_trip():
    prev = _kernels.set_backend("python")
    assert _kernels.impl is _pykernels
    _kernels.set_backend(prev)
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
