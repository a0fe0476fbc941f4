"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects (complex128, C order). All
routines are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NegativeSpectrum, NotHermitian

HERMITIAN_TOL = 1e-10
CLAMP_TOL = 1e-12
NEGATIVE_TOL = 1e-6


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply_function(self, fvals: np.ndarray) -> np.ndarray:
        """``V diag(fvals) V^dag`` for values already evaluated on the spectrum."""
        v = self.eigenvectors
        return (v * fvals) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)
    return float(np.max(np.abs(a - a.conj().T), initial=0.0)) <= tol * scale


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {a.shape}")
    if not is_hermitian(a, tol):
        raise NotHermitian(f"max |A - A^dag| = {np.max(np.abs(a - a.conj().T)):.3e}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry (i*rb + k, j*cb + l) is a[i, j] * b[k, l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def herm_eig(a, check: bool = True) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NotHermitian
        If ``a`` fails the symmetry check (relative tolerance 1e-10).
    """
    a = check_hermitian(a) if check else as_matrix(a)
    # symmetrize so LAPACK sees exactly the Hermitian part
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigenDecomposition(w, v)


def expm_hermitian_scaled(h, s: complex, eig: EigenDecomposition | None = None) -> np.ndarray:
    """``exp(s * h)`` for Hermitian ``h`` through its spectrum.

    Pass a precomputed ``eig`` to reuse one decomposition for many ``s``.
    """
    if eig is None:
        eig = herm_eig(h)
    return eig.apply_function(np.exp(complex(s) * eig.eigenvalues))


def sqrtm_psd(a) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    eig = herm_eig(a)
    w = eig.eigenvalues
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    if w.size and w[0] < -NEGATIVE_TOL * scale:
        raise NegativeSpectrum(f"minimum eigenvalue {w[0]:.3e}")
    w = np.where(w < CLAMP_TOL * scale, 0.0, w)
    return eig.apply_function(np.sqrt(w))


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    a = check_hermitian(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))


def partial_trace_dims(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the factors ``keep`` of a tensor product with ``dims``."""
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(f"state shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {len(dims)} factors")
    nf = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(nf) if i not in keep]
    # move kept (row, col) axes to the front, traced pairs to the back
    order = keep + [k + nf for k in keep] + traced + [i + nf for i in traced]
    t = np.transpose(t, order)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dk, dt, dt)
    return np.einsum("abii->ab", t)


def partial_trace(state, layout, keep="field") -> np.ndarray:
    """Reduced density matrix of ``state`` on the factors selected by ``keep``.

    ``layout`` is anything with a ``dims`` attribute (e.g. ``HilbertLayout``) or
    a sequence of factor dimensions. ``keep`` is ``"field"`` (factor 0),
    ``"atoms"`` (every other factor), an int, or a sequence of ints. Pure state
    vectors are accepted and traced without forming the full projector.
    """
    dims = list(getattr(layout, "dims", layout))
    if isinstance(keep, str):
        if keep == "field":
            keep = [0]
        elif keep == "atoms":
            keep = list(range(1, len(dims)))
        else:
            raise ValueError(f"unknown subsystem selector {keep!r}")
    elif np.isscalar(keep):
        keep = [int(keep)]
    data = getattr(state, "data", state)
    data = np.asarray(data, dtype=np.complex128)
    if data.ndim == 1:
        total = int(np.prod(dims))
        if data.size != total:
            raise DimensionMismatch(f"vector of length {data.size} does not match dims {dims}")
        keep = sorted(set(int(k) for k in keep))
        rest = [i for i in range(len(dims)) if i not in keep]
        t = np.transpose(data.reshape(dims), keep + rest)
        dk = int(np.prod([dims[k] for k in keep])) if keep else 1
        m = t.reshape(dk, -1)
        return m @ m.conj().T
    return partial_trace_dims(data, dims, keep)
