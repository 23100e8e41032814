import os
import subprocess
import sys

import numpy as np
from hypothesis import given, strategies as st

from bigjump import _accel

sizes = st.integers(min_value=1, max_value=60)


@given(na=sizes, nb=sizes, out=sizes, seed=st.integers(0, 2 ** 16))
def test_convolution_kernels_agree(na, nb, out, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.random(na), rng.random(nb)
    np.testing.assert_allclose(_accel.convolve(a, b, out), _accel.np_convolve(a, b, out), rtol=1e-13, atol=0)


@given(na=sizes, nb=sizes, seed=st.integers(0, 2 ** 16))
def test_log_convolution_matches_linear(na, nb, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.random(na) + 0.01, rng.random(nb) + 0.01
    out = na + nb - 1
    lin = _accel.np_convolve(a, b, out)
    np.testing.assert_allclose(np.exp(_accel.log_convolve(np.log(a), np.log(b), out)), lin, rtol=1e-12)
    np.testing.assert_allclose(np.exp(_accel.np_log_convolve(np.log(a), np.log(b), out)), lin, rtol=1e-12)


def test_log_convolution_handles_minus_infinity():
    la = np.array([0.0, -np.inf, -1.0])
    lb = np.array([-np.inf, -np.inf])
    assert np.all(np.isneginf(_accel.log_convolve(la, lb, 4)))


def test_exponential_sum_kernels_agree():
    rng = np.random.default_rng(3)
    k = 200
    args = (-rng.random(k) * 30, rng.random(k), np.full(k, 0.5), np.linspace(-5, 40, k),
            np.full(16, 0.02), np.linspace(0, np.pi, 16))
    np.testing.assert_allclose(_accel.expsum(*args), _accel.np_expsum(*args), rtol=1e-12)


def test_environment_switch_forces_numpy():
    env = dict(os.environ, BIGJUMP_DISABLE_NUMBA="1")
    code = "from bigjump import _accel; print(_accel.BACKEND, _accel.convolve is _accel.np_convolve)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
