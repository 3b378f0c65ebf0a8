"""Pure-Python (numpy) implementations of the hot kernels.

These are the reference versions; ``_ckernels`` provides compiled twins with
identical signatures.
"""
import numpy as np


def batch_roots(polys):
    """Roots of many polynomials of equal degree.

    ``polys`` has shape ``(n, d+1)`` with ascending coefficients and nonzero
    leading coefficient.  Returns ``(n, d)`` roots via batched companion
    eigenvalues.
    """
    polys = np.asarray(polys, dtype=complex)
    n, d1 = polys.shape
    d = d1 - 1
    monic = polys[:, :-1] / polys[:, -1:]
    comp = np.zeros((n, d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -monic
    return np.linalg.eigvals(comp)


def block_sum(contrib):
    """Neumaier-compensated sum of ``(nblocks, npts, ncomp)`` over the point axis."""
    contrib = np.asarray(contrib, dtype=complex)
    return _neumaier(contrib.real) + 1j * _neumaier(contrib.imag)


def _neumaier(a):
    s = np.zeros((a.shape[0], a.shape[2]))
    c = np.zeros_like(s)
    for i in range(a.shape[1]):
        x = a[:, i, :]
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + c
