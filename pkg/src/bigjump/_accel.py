"""Kernel dispatch between numba-compiled loops and plain numpy.

Set ``BIGJUMP_DISABLE_NUMBA=1`` to force the numpy implementations.  The
choice is made once at import time; ``BACKEND`` records which one is live.
"""

import os

import numpy as np

_disabled = os.environ.get("BIGJUMP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:
    numba = None

BACKEND = "numba" if numba is not None else "numpy"


def njit(func):
    if numba is None:
        return func
    return numba.njit(func, cache=True)


# -- dense convolution -------------------------------------------------------

def nb_convolve(a, b, out_len):
    """Truncated linear convolution with Neumaier-compensated sums."""
    out = np.zeros(out_len)
    na = a.shape[0]
    nb = b.shape[0]
    for m in range(out_len):
        lo = max(0, m - nb + 1)
        hi = min(m, na - 1)
        s = 0.0
        comp = 0.0
        for i in range(lo, hi + 1):
            x = a[i] * b[m - i]
            t = s + x
            if abs(s) >= abs(x):
                comp += (s - t) + x
            else:
                comp += (x - t) + s
            s = t
        out[m] = s + comp
    return out


def np_convolve(a, b, out_len):
    full = np.convolve(a, b)
    out = np.zeros(out_len)
    k = min(out_len, full.shape[0])
    out[:k] = full[:k]
    return out


def nb_log_convolve(la, lb, out_len):
    """Convolution of log-weights: out[m] = log sum_i exp(la[i] + lb[m-i])."""
    out = np.full(out_len, -np.inf)
    na = la.shape[0]
    nb = lb.shape[0]
    for m in range(out_len):
        lo = max(0, m - nb + 1)
        hi = min(m, na - 1)
        peak = -np.inf
        for i in range(lo, hi + 1):
            v = la[i] + lb[m - i]
            if v > peak:
                peak = v
        if peak == -np.inf:
            continue
        s = 0.0
        for i in range(lo, hi + 1):
            s += np.exp(la[i] + lb[m - i] - peak)
        out[m] = peak + np.log(s)
    return out


def np_log_convolve(la, lb, out_len):
    out = np.full(out_len, -np.inf)
    nb = lb.shape[0]
    for m in range(out_len):
        lo = max(0, m - nb + 1)
        hi = min(m, la.shape[0] - 1)
        if hi < lo:
            continue
        v = la[lo:hi + 1] + lb[m - lo - np.arange(hi - lo + 1)]
        peak = v.max()
        if peak == -np.inf:
            continue
        out[m] = peak + np.log(np.exp(v - peak).sum())
    return out


# -- exponential sums for contour integrals ----------------------------------

def nb_expsum(logw_re, logw_im, xi_re, xi_im, v_re, v_im):
    """out[i] = sum_j exp(logw[j] + xi[j] * v[i]) for complex logw, xi, v."""
    nv = v_re.shape[0]
    nj = logw_re.shape[0]
    out = np.zeros(nv, dtype=np.complex128)
    for i in range(nv):
        acc_re = 0.0
        acc_im = 0.0
        vr = v_re[i]
        vi = v_im[i]
        for j in range(nj):
            er = logw_re[j] + xi_re[j] * vr - xi_im[j] * vi
            if er < -745.0:
                continue
            ei = logw_im[j] + xi_re[j] * vi + xi_im[j] * vr
            mag = np.exp(er)
            acc_re += mag * np.cos(ei)
            acc_im += mag * np.sin(ei)
        out[i] = complex(acc_re, acc_im)
    return out


def np_expsum(logw_re, logw_im, xi_re, xi_im, v_re, v_im):
    logw = logw_re + 1j * logw_im
    xi = xi_re + 1j * xi_im
    v = v_re + 1j * v_im
    out = np.empty(v.shape[0], dtype=np.complex128)
    chunk = max(1, 2_000_000 // max(1, logw.shape[0]))
    for s in range(0, v.shape[0], chunk):
        block = logw[None, :] + np.outer(v[s:s + chunk], xi)
        out[s:s + chunk] = np.exp(block).sum(axis=1)
    return out


if numba is not None:
    convolve = njit(nb_convolve)
    log_convolve = njit(nb_log_convolve)
    expsum = njit(nb_expsum)
else:
    convolve = np_convolve
    log_convolve = np_log_convolve
    expsum = np_expsum
