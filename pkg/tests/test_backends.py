import ast
import os
import subprocess
import sys

import numpy as np
import pytest

from siegelcurv import _pykernels, kernels

ext = pytest.importorskip("siegelcurv._ckernels")


def _match_roots(a, b):
    """Max distance after greedily pairing the roots of each row."""
    worst = 0.0
    for ra, rb in zip(a, b):
        rb = list(rb)
        for z in ra:
            k = int(np.argmin(np.abs(np.array(rb) - z)))
            worst = max(worst, abs(rb.pop(k) - z))
    return worst


def test_roots_agree(rng):
    polys = rng.normal(size=(200, 6)) + 1j * rng.normal(size=(200, 6))
    a = ext.batch_roots(polys)
    b = _pykernels.batch_roots(polys)
    assert _match_roots(a, b) < 1e-10
    resid = np.array([np.abs(np.polyval(p[::-1], r)).max() for p, r in zip(polys, a)])
    assert resid.max() < 1e-12 * np.abs(polys).max()


def test_roots_of_fermat_fibre():
    # y^5 = -1 - x^5 at x = 0.5: roots on a circle
    p = np.zeros((1, 6), dtype=complex)
    p[0, 0], p[0, 5] = 1 + 0.5 ** 5, 1
    r = ext.batch_roots(p)[0]
    np.testing.assert_allclose(np.abs(r), (1 + 0.5 ** 5) ** 0.2, rtol=1e-14)


def test_block_sum_agrees(rng):
    c = rng.normal(size=(7, 49, 5)) + 1j * rng.normal(size=(7, 49, 5))
    np.testing.assert_allclose(ext.block_sum(c), _pykernels.block_sum(c), rtol=0, atol=1e-14)
    np.testing.assert_allclose(ext.block_sum(c), c.sum(axis=1), rtol=1e-13)


def test_block_sum_is_compensated():
    c = np.array([[[1.0], [1e100], [1.0], [-1e100]]], dtype=complex)
    assert ext.block_sum(c)[0, 0] == 2.0
    assert _pykernels.block_sum(c)[0, 0] == 2.0


def test_dispatch():
    assert kernels.BACKEND in ("cython", "python")
    if not os.environ.get("SIEGELCURV_PURE"):
        assert kernels.BACKEND == "cython"


def test_pure_fallback_matches():
    code = ("import numpy as np; from siegelcurv import curves, kernels; "
            "from siegelcurv.hodge import gram_matrix, gram_quadrature_spec; "
            "c = curves.fermat_quintic(); b = curves.differential_basis(c); "
            "G = gram_matrix(c, b, gram_quadrature_spec(c, 1e-5)).G; "
            "print(kernels.BACKEND); print(repr(G.ravel().tolist()))")
    out = {}
    for pure in ("", "1"):
        env = dict(os.environ, SIEGELCURV_PURE=pure)
        if not pure:
            env.pop("SIEGELCURV_PURE")
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, values = res.stdout.strip().splitlines()
        out[backend] = np.array(ast.literal_eval(values))
    assert set(out) == {"cython", "python"}
    np.testing.assert_allclose(out["cython"], out["python"], rtol=1e-10, atol=1e-12)
