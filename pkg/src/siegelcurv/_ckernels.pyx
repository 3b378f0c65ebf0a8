# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batched polynomial roots and compensated block sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, fabs, pow, M_PI

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)

ctypedef double complex cplx

DEF MAX_ITER = 200


cdef inline void _horner(const cplx* p, int d, cplx z, cplx* val, cplx* der) noexcept nogil:
    cdef cplx v = p[d]
    cdef cplx dv = 0
    cdef int k
    for k in range(d - 1, -1, -1):
        dv = dv * z + v
        v = v * z + p[k]
    val[0] = v
    der[0] = dv


cdef void _aberth(const cplx* p, int d, cplx* z) noexcept nogil:
    """Aberth-Ehrlich iteration for one polynomial (ascending coefficients)."""
    cdef int i, j, it, done
    cdef double r = 0.0, lead = cabs(p[d]), t
    cdef cplx val, der, ratio, s, w
    for i in range(d):
        t = pow(cabs(p[i]) / lead, 1.0 / (d - i))
        if t > r:
            r = t
    r = 2.0 * r if r > 0 else 1.0
    for i in range(d):
        t = 2.0 * M_PI * i / d + 0.4
        z[i] = r * (cos(t) + 1j * sin(t))
    for it in range(MAX_ITER):
        done = 1
        for i in range(d):
            _horner(p, d, z[i], &val, &der)
            if val == 0:
                continue
            ratio = val / der if der != 0 else val
            s = 0
            for j in range(d):
                if j != i:
                    s = s + 1.0 / (z[i] - z[j])
            w = ratio / (1.0 - ratio * s)
            z[i] = z[i] - w
            if cabs(w) > 1e-15 * (1.0 + cabs(z[i])):
                done = 0
        if done:
            break
    # one Newton step per root for the last bits
    for i in range(d):
        _horner(p, d, z[i], &val, &der)
        if der != 0:
            w = val / der
            if cabs(w) < 1e-6 * (1.0 + cabs(z[i])):
                z[i] = z[i] - w


def batch_roots(polys):
    """Roots of each row of ``polys`` (ascending coefficients, nonzero leading term)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] P = np.ascontiguousarray(polys, dtype=np.complex128)
    cdef Py_ssize_t n = P.shape[0], k
    cdef int d = <int>P.shape[1] - 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((n, d), dtype=np.complex128)
    cdef cplx* pp = <cplx*>P.data
    cdef cplx* po = <cplx*>out.data
    with nogil:
        for k in range(n):
            _aberth(pp + k * (d + 1), d, po + k * d)
    return out


def block_sum(contrib):
    """Neumaier-compensated sum of ``(nblocks, npts, ncomp)`` over the point axis."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] C = np.ascontiguousarray(contrib, dtype=np.complex128)
    cdef Py_ssize_t nb = C.shape[0], npt = C.shape[1], nc = C.shape[2], b, i, c
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((nb, nc), dtype=np.complex128)
    cdef double sr, si, cr, ci, xr, xi, tr, ti
    with nogil:
        for b in range(nb):
            for c in range(nc):
                sr = 0.0; si = 0.0; cr = 0.0; ci = 0.0
                for i in range(npt):
                    xr = C[b, i, c].real
                    xi = C[b, i, c].imag
                    tr = sr + xr
                    if fabs(sr) >= fabs(xr):
                        cr += (sr - tr) + xr
                    else:
                        cr += (xr - tr) + sr
                    sr = tr
                    ti = si + xi
                    if fabs(si) >= fabs(xi):
                        ci += (si - ti) + xi
                    else:
                        ci += (xi - ti) + si
                    si = ti
                out[b, c] = (sr + cr) + 1j * (si + ci)
    return out
