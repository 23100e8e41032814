"""Time the numba kernels against their numpy fallbacks.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is called once
to trigger compilation before timing.
"""

import argparse
import timeit

import numpy as np

from bigjump import _accel


def _cases(size):
    rng = np.random.default_rng(0)
    a = rng.random(size)
    b = rng.random(size)
    la, lb = np.log(a), np.log(b)
    nodes = 4 * size
    lw_re = -rng.random(nodes) * 50
    lw_im = rng.random(nodes)
    xi_re = np.full(nodes, 0.5)
    xi_im = np.linspace(-20, 2000, nodes)
    v_re = np.full(64, 0.01)
    v_im = np.linspace(0, np.pi, 64)
    return {
        "convolve": ((a, b, size), _accel.convolve, _accel.np_convolve),
        "log_convolve": ((la, lb, size), _accel.log_convolve, _accel.np_log_convolve),
        "expsum": ((lw_re, lw_im, xi_re, xi_im, v_re, v_im), _accel.expsum, _accel.np_expsum),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=4000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    print(f"backend available: {_accel.BACKEND}")
    print(f"{'kernel':<14}{'numba s':>12}{'numpy s':>12}{'max rel diff':>16}")
    for name, (inputs, fast, slow) in _cases(args.size).items():
        ref = slow(*inputs)
        if _accel.BACKEND == "numba":
            out = fast(*inputs)
            t_fast = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
            diff = float(np.max(np.abs(out - ref) / np.maximum(np.abs(ref), 1e-300)))
        else:
            t_fast, diff = float("nan"), float("nan")
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        print(f"{name:<14}{t_fast:>12.4f}{t_slow:>12.4f}{diff:>16.3e}")


if __name__ == "__main__":
    main()
