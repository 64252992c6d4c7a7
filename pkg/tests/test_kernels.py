import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridnet import _kernels


def random_grid(seed, n_v, n_t):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(-300, 300, n_v), rng.uniform(-300, 300, n_v), rng.uniform(0, 360, n_v),
        rng.uniform(-300, 300, n_t), rng.uniform(-300, 300, n_t), rng.uniform(0, 360, n_t),
        rng.uniform(20, 35, n_t), rng.random((n_v, n_t)) < 0.8,
        np.where(rng.random((n_v, n_t)) < 0.2, 10.0, 0.0),
        60e9, 15.0, 15.0, 15.0, -10.0, 10.0,
    )


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 40), st.integers(0, 40))
def test_numba_and_numpy_agree(seed, n_v, n_t):
    args = random_grid(seed, n_v, n_t)
    a = _kernels.interference_mw_numpy(*args)
    b = _kernels.interference_mw_numba(*args)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0.0)


def test_loop_and_broadcast_agree_without_jit():
    args = random_grid(5, 7, 9)
    np.testing.assert_allclose(
        _kernels.interference_mw_numpy(*args), _kernels._interference_mw_loop(*args), rtol=1e-12
    )


def test_inactive_paths_contribute_nothing():
    args = list(random_grid(1, 4, 6))
    args[7] = np.zeros((4, 6), dtype=bool)
    assert not _kernels.interference_mw(*args).any()


def test_backend_flag(monkeypatch):
    monkeypatch.setenv("HYBRIDNET_NUMBA", "0")
    assert not _kernels.numba_enabled()
    monkeypatch.setenv("HYBRIDNET_NUMBA", "1")
    assert _kernels.numba_enabled() == _kernels.HAVE_NUMBA
