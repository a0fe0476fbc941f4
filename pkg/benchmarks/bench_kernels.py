"""Compiled versus pure-Python kernel timings.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat 5]``. Each kernel is
timed on inputs of the sizes met in a typical optimization and the best of
``repeat`` runs is reported, together with the largest difference between
the two backends.
"""

import argparse
import timeit

import numpy as np

from fockgen import kernels
from fockgen.dynamics import DecoherenceSpec, InteractionHamiltonian, LindbladSolver
from fockgen.hilbert import CoherentSpec, HilbertLayout, initial_state


def _cases():
    lay = HilbertLayout(30, 1)
    s = LindbladSolver(InteractionHamiltonian(lay), DecoherenceSpec(0.02, 0.05, 0.05))
    rho = initial_state(CoherentSpec.from_nbar(5.0), 1, 30).density_matrix()
    rk4 = (rho, s._hdata, s._hind, s._hptr, s._jcols, s._jvals, 1e-3, 200)
    alphas = (np.linspace(-3, 3, 61)[:, None] + 1j * np.linspace(-3, 3, 61)[None, :]).ravel() / np.sqrt(2)
    field = rho.reshape(30, 2, 30, 2).trace(axis1=1, axis2=3)
    return {
        "lindblad_rk4 (dim 60, 200 steps)": ("lindblad_rk4", rk4),
        "displacement_matrix (dim 200)": ("displacement_matrix", (0.65 + 0.1j, 200)),
        "wigner_parity (dim 30, 61x61 grid)": ("wigner_parity", (field, alphas)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not available; only the Python backend can be timed")
    print(f"{'kernel':38s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s} {'max diff':>10s}")
    for label, (name, call_args) in _cases().items():
        py = getattr(kernels.python, name)
        t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat))
        if kernels.compiled is None:
            print(f"{label:38s} {1e3 * t_py:12.2f} {'-':>14s}")
            continue
        cc = getattr(kernels.compiled, name)
        t_cc = min(timeit.repeat(lambda: cc(*call_args), number=1, repeat=args.repeat))
        diff = np.max(np.abs(np.asarray(py(*call_args)) - np.asarray(cc(*call_args))))
        print(f"{label:38s} {1e3 * t_py:12.2f} {1e3 * t_cc:14.2f} {t_py / t_cc:7.1f}x {diff:10.1e}")


if __name__ == "__main__":
    main()
