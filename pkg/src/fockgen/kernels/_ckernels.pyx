# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Lindblad RK4 stepping, displacement matrices, Wigner pixels."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, cos, sin, lgamma, atan2, M_PI

cnp.import_array()

ctypedef double complex cplx


cdef void _rhs(const cplx[:, ::1] rho,
               const cplx[::1] hdata, const cnp.int64_t[::1] hind, const cnp.int64_t[::1] hptr,
               const cnp.int64_t[:, ::1] jcols, const cplx[:, ::1] jvals,
               cplx[:, ::1] x, cplx[:, ::1] out) noexcept nogil:
    # out = -i (X - X^dag) + sum_c c rho c^dag, with X = Heff rho (rho Hermitian)
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t njump = jcols.shape[0]
    cdef Py_ssize_t i, j, p, c, ci
    cdef cplx h, vi, z
    for i in range(dim):
        for j in range(dim):
            x[i, j] = 0
        for p in range(hptr[i], hptr[i + 1]):
            h = hdata[p]
            ci = hind[p]
            for j in range(dim):
                x[i, j] = x[i, j] + h * rho[ci, j]
    for i in range(dim):
        for j in range(dim):
            z = x[i, j] - x[j, i].conjugate()
            out[i, j] = -1j * z
    for c in range(njump):
        for i in range(dim):
            vi = jvals[c, i]
            if vi == 0:
                continue
            ci = jcols[c, i]
            for j in range(dim):
                if jvals[c, j] != 0:
                    out[i, j] = out[i, j] + vi * jvals[c, j].conjugate() * rho[ci, jcols[c, j]]


def lindblad_rk4(rho0, hdata, hind, hptr, jcols, jvals, double dt, Py_ssize_t nsteps):
    """Advance ``rho0`` by ``nsteps`` fixed RK4 steps of size ``dt``.

    ``H_eff`` is given in CSR form; each jump operator has at most one
    nonzero per row, stored as (column, value) per row.
    """
    cdef cplx[:, ::1] rho = np.array(rho0, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t dim = rho.shape[0]
    cdef cplx[::1] hd = np.ascontiguousarray(hdata, dtype=np.complex128)
    cdef cnp.int64_t[::1] hi = np.ascontiguousarray(hind, dtype=np.int64)
    cdef cnp.int64_t[::1] hp = np.ascontiguousarray(hptr, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] jc = np.ascontiguousarray(jcols, dtype=np.int64).reshape(-1, dim)
    cdef cplx[:, ::1] jv = np.ascontiguousarray(jvals, dtype=np.complex128).reshape(-1, dim)
    cdef cplx[:, ::1] x = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] k = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] acc = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] tmp = np.empty((dim, dim), dtype=np.complex128)
    cdef Py_ssize_t s, i, j
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef cplx z
    with nogil:
        for s in range(nsteps):
            _rhs(rho, hd, hi, hp, jc, jv, x, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = k[i, j]
                    tmp[i, j] = rho[i, j] + h2 * k[i, j]
            _rhs(tmp, hd, hi, hp, jc, jv, x, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = acc[i, j] + 2.0 * k[i, j]
                    tmp[i, j] = rho[i, j] + h2 * k[i, j]
            _rhs(tmp, hd, hi, hp, jc, jv, x, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = acc[i, j] + 2.0 * k[i, j]
                    tmp[i, j] = rho[i, j] + dt * k[i, j]
            _rhs(tmp, hd, hi, hp, jc, jv, x, k)
            for i in range(dim):
                for j in range(dim):
                    tmp[i, j] = rho[i, j] + h6 * (acc[i, j] + k[i, j])
            for i in range(dim):
                for j in range(i, dim):
                    z = 0.5 * (tmp[i, j] + tmp[j, i].conjugate())
                    rho[i, j] = z
                    rho[j, i] = z.conjugate()
    return np.asarray(rho)


cdef void _laguerre_column(double x, double logamp, Py_ssize_t k, Py_ssize_t nmax,
                           double* f) noexcept nogil:
    # f[n] = e^{-x/2} |b|^k sqrt(n!/(n+k)!) L_n^k(x), n = 0..nmax-1
    cdef Py_ssize_t n
    if nmax <= 0:
        return
    f[0] = exp(-0.5 * x + k * logamp - 0.5 * lgamma(k + 1.0))
    if nmax > 1:
        f[1] = (1.0 + k - x) * f[0] / sqrt(1.0 + k)
    for n in range(1, nmax - 1):
        f[n + 1] = ((2.0 * n + 1.0 + k - x) * f[n] - sqrt(<double>n * (n + k)) * f[n - 1]) \
            / sqrt((n + 1.0) * (n + 1.0 + k))


def displacement_matrix(cplx beta, Py_ssize_t dim):
    """Matrix elements <m|D(beta)|n> for 0 <= m, n < dim."""
    out_np = np.zeros((dim, dim), dtype=np.complex128)
    if beta == 0:
        out_np[np.diag_indices(dim)] = 1.0
        return out_np
    cdef cplx[:, ::1] out = out_np
    cdef double amp = abs(beta)
    cdef double x = amp * amp
    cdef double logamp = log(amp)
    cdef double theta = atan2(beta.imag, beta.real)
    cdef double[::1] f = np.empty(dim, dtype=np.float64)
    cdef Py_ssize_t k, n
    cdef cplx ph, phc
    with nogil:
        for k in range(dim):
            _laguerre_column(x, logamp, k, dim - k, &f[0])
            ph = cos(k * theta) + 1j * sin(k * theta)
            phc = ph.conjugate()
            if k % 2 == 1:
                phc = -phc
            for n in range(dim - k):
                out[n + k, n] = f[n] * ph
                if k > 0:
                    out[n, n + k] = f[n] * phc
    return out_np


def wigner_parity(rho_in, alphas_in):
    """(1/pi) Tr[rho D(2a) P] for each complex ``a`` in ``alphas_in``; rho Hermitian."""
    cdef cplx[:, ::1] rho = np.ascontiguousarray(rho_in, dtype=np.complex128)
    cdef cplx[::1] alphas = np.ascontiguousarray(alphas_in, dtype=np.complex128).ravel()
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t npix = alphas.shape[0]
    out_np = np.empty(npix, dtype=np.float64)
    cdef double[::1] out = out_np
    cdef double[::1] f = np.empty(dim, dtype=np.float64)
    cdef Py_ssize_t p, k, n
    cdef double amp, x, logamp, theta, acc, sgn
    cdef cplx ph, s
    with nogil:
        for p in range(npix):
            amp = 2.0 * abs(alphas[p])
            x = amp * amp
            acc = 0.0
            if amp == 0:
                sgn = 1.0
                for n in range(dim):
                    acc = acc + sgn * rho[n, n].real
                    sgn = -sgn
                out[p] = acc / M_PI
                continue
            logamp = log(amp)
            theta = atan2(alphas[p].imag, alphas[p].real)
            for k in range(dim):
                _laguerre_column(x, logamp, k, dim - k, &f[0])
                s = 0
                sgn = 1.0
                for n in range(dim - k):
                    s = s + sgn * f[n] * rho[n, n + k]
                    sgn = -sgn
                if k == 0:
                    acc = acc + s.real
                else:
                    ph = cos(k * theta) + 1j * sin(k * theta)
                    acc = acc + 2.0 * (s * ph).real
            out[p] = acc / M_PI
    return out_np
