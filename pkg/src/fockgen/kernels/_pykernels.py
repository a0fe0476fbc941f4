"""Pure numpy/scipy versions of the compiled kernels (same signatures)."""

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln


def _rhs(rho, heff, jcols, jvals, jmask):
    x = heff @ rho
    out = -1j * (x - x.conj().T)
    for cols, vals, mask in zip(jcols, jvals, jmask):
        v = vals[mask]
        c = cols[mask]
        out[np.ix_(mask, mask)] += np.outer(v, v.conj()) * rho[np.ix_(c, c)]
    return out


def lindblad_rk4(rho0, hdata, hind, hptr, jcols, jvals, dt, nsteps):
    """Advance ``rho0`` by ``nsteps`` fixed RK4 steps of size ``dt``."""
    rho = np.array(rho0, dtype=np.complex128, copy=True)
    dim = rho.shape[0]
    heff = sp.csr_matrix((hdata, hind, hptr), shape=(dim, dim))
    jcols = np.asarray(jcols, dtype=np.int64).reshape(-1, dim)
    jvals = np.asarray(jvals, dtype=np.complex128).reshape(-1, dim)
    jmask = jvals != 0
    for _ in range(int(nsteps)):
        k1 = _rhs(rho, heff, jcols, jvals, jmask)
        k2 = _rhs(rho + 0.5 * dt * k1, heff, jcols, jvals, jmask)
        k3 = _rhs(rho + 0.5 * dt * k2, heff, jcols, jvals, jmask)
        k4 = _rhs(rho + dt * k3, heff, jcols, jvals, jmask)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
    return rho


def _laguerre_table(x, logamp, dim):
    """f[k, n] = e^{-x/2} |b|^k sqrt(n!/(n+k)!) L_n^k(x); entries with n + k >= dim unused.

    ``x`` and ``logamp`` may carry a leading batch axis.
    """
    x = np.asarray(x, dtype=float)[..., None]
    logamp = np.asarray(logamp, dtype=float)[..., None]
    k = np.arange(dim, dtype=float)
    f = np.zeros(x.shape[:-1] + (dim, dim))
    f[..., 0] = np.exp(-0.5 * x + k * logamp - 0.5 * gammaln(k + 1.0))
    if dim > 1:
        f[..., 1] = (1.0 + k - x) * f[..., 0] / np.sqrt(1.0 + k)
    for n in range(1, dim - 1):
        f[..., n + 1] = ((2.0 * n + 1.0 + k - x) * f[..., n]
                         - np.sqrt(n * (n + k)) * f[..., n - 1]) / np.sqrt((n + 1.0) * (n + 1.0 + k))
    return f


def displacement_matrix(beta, dim):
    """Matrix elements <m|D(beta)|n> for 0 <= m, n < dim."""
    beta = complex(beta)
    if beta == 0:
        return np.eye(dim, dtype=np.complex128)
    amp = abs(beta)
    theta = np.angle(beta)
    f = _laguerre_table(amp * amp, np.log(amp), dim)
    m, n = np.indices((dim, dim))
    k = np.abs(m - n)
    lo = np.minimum(m, n)
    vals = f[k, lo]
    phase = np.where(m >= n, np.exp(1j * k * theta), (-1.0) ** k * np.exp(-1j * k * theta))
    return vals * phase


def wigner_parity(rho, alphas, chunk=None):
    """(1/pi) Tr[rho D(2a) P] for each complex ``a`` in ``alphas``; rho Hermitian."""
    rho = np.asarray(rho, dtype=np.complex128)
    alphas = np.asarray(alphas, dtype=np.complex128).ravel()
    dim = rho.shape[0]
    if chunk is None:
        chunk = max(1, int(4e6 // (dim * dim)))
    out = np.empty(alphas.size)
    sgn = (-1.0) ** np.arange(dim)
    # diagonals rho[n, n+k] padded to length dim
    diags = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        diags[k, : dim - k] = np.diagonal(rho, offset=k) * sgn[: dim - k]
    powk = np.arange(dim)
    for start in range(0, alphas.size, chunk):
        a = alphas[start:start + chunk]
        amp = 2.0 * np.abs(a)
        safe = np.where(amp > 0, amp, 1.0)
        f = _laguerre_table(safe ** 2, np.log(safe), dim)
        s = np.einsum("pkn,kn->pk", f, diags)
        ph = np.exp(1j * np.angle(a)[:, None] * powk[None, :])
        w = s[:, 0].real + 2.0 * (s[:, 1:] * ph[:, 1:]).real.sum(axis=1)
        w = np.where(amp > 0, w, np.real(np.sum(np.diagonal(rho) * sgn)))
        out[start:start + chunk] = w / np.pi
    return out
