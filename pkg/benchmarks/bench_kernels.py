"""Compiled versus numpy kernels: micro timings plus one end-to-end Gram build.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from siegelcurv import _pykernels

try:
    from siegelcurv import _ckernels
except ImportError:
    _ckernels = None

GRAM = ("import time; from siegelcurv import curves, kernels; "
        "from siegelcurv.hodge import gram_matrix, gram_quadrature_spec; "
        "c = curves.fermat_quintic(); b = curves.differential_basis(c); t = time.perf_counter(); "
        "gram_matrix(c, b, gram_quadrature_spec(c, 1e-7)); print(kernels.BACKEND, time.perf_counter() - t)")


def micro(repeat):
    rng = np.random.default_rng(0)
    polys = rng.normal(size=(20000, 6)) + 1j * rng.normal(size=(20000, 6))
    blocks = rng.normal(size=(2000, 49, 36)) + 1j * rng.normal(size=(2000, 49, 36))
    cases = [("batch_roots 20000 x deg 5", "batch_roots", polys),
             ("block_sum 2000 x 49 x 36", "block_sum", blocks)]
    for label, name, arg in cases:
        row = [label]
        for mod in (_pykernels, _ckernels):
            if mod is None:
                row.append("n/a")
                continue
            fn = getattr(mod, name)
            t = min(timeit.repeat(lambda: fn(arg), number=1, repeat=repeat))
            row.append(f"{t * 1e3:9.1f} ms")
        print(f"{row[0]:<28} python {row[1]}   cython {row[2]}")


def end_to_end():
    for pure in ("1", ""):
        env = dict(os.environ)
        env.pop("SIEGELCURV_PURE", None)
        if pure:
            env["SIEGELCURV_PURE"] = pure
        out = subprocess.run([sys.executable, "-c", GRAM], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"quintic Gram, rtol 1e-7       {backend:<7} {float(secs):7.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-gram", action="store_true")
    args = ap.parse_args()
    micro(args.repeat)
    if not args.skip_gram:
        end_to_end()


if __name__ == "__main__":
    main()
