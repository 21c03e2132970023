"""Backend parity: the jitted kernels must agree with the numpy reference."""

import numpy as np
import pytest

from kbwalk.kernels import _numpy_backend

from helpers import random_unit_rows

try:
    from kbwalk.kernels import _numba_backend
except ImportError:  # pragma: no cover
    _numba_backend = None

needs_numba = pytest.mark.skipif(_numba_backend is None,
                                 reason="numba unavailable")


@needs_numba
class TestBackendParity:
    def test_relaxed_wmd(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = random_unit_rows(rng, int(rng.integers(1, 9)), 16)
            b = random_unit_rows(rng, int(rng.integers(1, 9)), 16)
            assert _numba_backend.relaxed_wmd(a, b) == \
                pytest.approx(_numpy_backend.relaxed_wmd(a, b), abs=1e-12)

    def test_batch_cosine(self):
        rng = np.random.default_rng(2)
        m = random_unit_rows(rng, 20, 32)
        v = random_unit_rows(rng, 1, 32)[0]
        assert np.allclose(_numba_backend.batch_cosine(m, v),
                           _numpy_backend.batch_cosine(m, v), atol=1e-12)

    def test_softmax_weights(self):
        rng = np.random.default_rng(3)
        for temp in (0.5, 1.0, 3.0):
            s = rng.normal(size=12)
            got = _numba_backend.softmax_weights(s, temp)
            want = _numpy_backend.softmax_weights(s, temp)
            assert np.allclose(got, want, atol=1e-12)
            assert got.sum() == pytest.approx(1.0)


class TestNumpyBackendProperties:
    def test_wmd_identical_clouds_zero(self):
        rng = np.random.default_rng(4)
        a = random_unit_rows(rng, 5, 8)
        assert _numpy_backend.relaxed_wmd(a, a) == pytest.approx(0.0, abs=1e-12)

    def test_wmd_symmetric(self):
        rng = np.random.default_rng(5)
        a = random_unit_rows(rng, 4, 8)
        b = random_unit_rows(rng, 6, 8)
        assert _numpy_backend.relaxed_wmd(a, b) == \
            pytest.approx(_numpy_backend.relaxed_wmd(b, a))

    def test_softmax_order_preserving(self):
        s = np.array([0.1, 0.9, 0.5])
        w = _numpy_backend.softmax_weights(s, 1.0)
        assert list(np.argsort(w)) == list(np.argsort(s))
