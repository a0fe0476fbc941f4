"""Truncated Fock space, atomic registers, canonical operators and states.

Basis conventions
-----------------
The composite space is ordered ``field (x) atom_1 (x) ... (x) atom_N``. The
field factor holds Fock states ``|0>, ..., |field_dim - 1>``; each atom has
basis order ``(|e>, |g>)`` so that ``sigma_z = diag(1, -1)`` and
``sigma_- |e> = |g>``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.special import eval_genlaguerre, gammaln

from . import kernels
from .errors import (DimensionMismatch, IndexOutOfRange, TruncationTooSmall,
                     UnsupportedAtomCount)
from .linalg import expm_hermitian_scaled, herm_eig, kron_all, partial_trace

BASIS_NOTE = "basis: field (x) atom_1 (x) ... (x) atom_N; Fock |0>..|d-1>; atom order (|e>, |g>)"
NORM_TOL = 1e-10
TRUNCATION_TOL = 1e-8

# single-atom matrices in the (|e>, |g>) basis
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
KET_E = np.array([1.0, 0.0], dtype=np.complex128)
KET_G = np.array([0.0, 1.0], dtype=np.complex128)


@dataclass(frozen=True)
class HilbertLayout:
    """Truncation and factor order of the composite space.

    ``atom_count = 0`` describes a field-only space.
    """

    field_dim: int
    atom_count: int = 1

    def __post_init__(self):
        if self.field_dim < 2:
            raise ValueError("field_dim must be >= 2")
        if self.atom_count < 0:
            raise ValueError("atom_count must be >= 0")

    @property
    def atom_dim(self) -> int:
        return 2 ** self.atom_count

    @property
    def total_dim(self) -> int:
        return self.field_dim * self.atom_dim

    @property
    def dims(self) -> tuple:
        return (self.field_dim,) + (2,) * self.atom_count

    def field_only(self) -> "HilbertLayout":
        return HilbertLayout(self.field_dim, 0)

    def to_dict(self) -> dict:
        return {"field_dim": self.field_dim, "atom_count": self.atom_count, "basis": BASIS_NOTE}


@dataclass(frozen=True)
class CoherentSpec:
    alpha: complex

    @property
    def nbar(self) -> float:
        return abs(self.alpha) ** 2

    @classmethod
    def from_nbar(cls, nbar: float) -> "CoherentSpec":
        return cls(complex(math.sqrt(nbar)))

    def amplitudes(self, field_dim: int) -> np.ndarray:
        """Untruncated-normalization amplitudes ``C_n`` for ``n < field_dim``."""
        return coherent_amplitudes(self.alpha, field_dim)


class QuantumState:
    """Pure vector or density matrix on a ``HilbertLayout``."""

    __slots__ = ("layout", "data")

    def __init__(self, layout: HilbertLayout, data):
        data = np.asarray(data, dtype=np.complex128)
        n = layout.total_dim
        if data.shape not in ((n,), (n, n)):
            raise DimensionMismatch(f"data shape {data.shape} incompatible with layout dim {n}")
        self.layout = layout
        self.data = data

    def __repr__(self):
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState({kind}, field_dim={self.layout.field_dim}, atoms={self.layout.atom_count})"

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def to_density(self) -> "QuantumState":
        return self if not self.is_pure else QuantumState(self.layout, self.density_matrix())

    def norm(self) -> float:
        if self.is_pure:
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)

    def field_state(self) -> "QuantumState":
        """Reduced field state (atoms traced out)."""
        if self.layout.atom_count == 0:
            return self
        return QuantumState(self.layout.field_only(), partial_trace(self.data, self.layout, "field"))

    def validate(self) -> "QuantumState":
        if self.is_pure:
            if abs(self.norm() - 1.0) > NORM_TOL:
                raise ValueError(f"state norm {self.norm():.12f} != 1")
            return self
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > NORM_TOL:
            raise ValueError(f"trace {np.trace(rho).real:.12f} != 1")
        if np.linalg.eigvalsh(rho)[0] < -1e-8:
            raise ValueError("density matrix has negative eigenvalues")
        return self


def default_field_dim(nbar: float, extra: int = 0) -> int:
    """Fock truncation comfortably above twice the mean photon number."""
    nbar = float(nbar)
    return int(max(math.ceil(2.2 * nbar), nbar + math.ceil(7.0 * math.sqrt(nbar)))) + 10 + int(extra)


def fock_state(n: int, field_dim: int) -> QuantumState:
    if not 0 <= n < field_dim:
        raise IndexOutOfRange(f"Fock index {n} outside truncation {field_dim}")
    v = np.zeros(field_dim, dtype=np.complex128)
    v[n] = 1.0
    return QuantumState(HilbertLayout(field_dim, 0), v)


def ladder_operators(field_dim: int):
    """Truncated ``a``, ``a^dag`` and ``n = a^dag a``."""
    if field_dim < 2:
        raise ValueError("field_dim must be >= 2")
    a = np.diag(np.sqrt(np.arange(1, field_dim, dtype=float)), 1).astype(np.complex128)
    a_dag = a.conj().T.copy()
    n_op = a_dag @ a
    return a, a_dag, n_op


def coherent_amplitudes(alpha: complex, field_dim: int) -> np.ndarray:
    n = np.arange(field_dim)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(field_dim, dtype=np.complex128)
        out[0] = 1.0
        return out
    r, phi = abs(alpha), np.angle(alpha)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1.0)
    return np.exp(logmag) * np.exp(1j * phi * n)


def coherent_state(spec: CoherentSpec, field_dim: int) -> QuantumState:
    """Truncated, renormalized coherent field state.

    Raises
    ------
    TruncationTooSmall
        If the probability lost to truncation exceeds 1e-8.
    """
    c = coherent_amplitudes(spec.alpha, field_dim)
    norm2 = float(np.sum(np.abs(c) ** 2))
    if 1.0 - norm2 > TRUNCATION_TOL:
        raise TruncationTooSmall(
            f"field_dim={field_dim} keeps only {norm2:.10f} of |alpha|^2={spec.nbar:g}")
    return QuantumState(HilbertLayout(field_dim, 0), c / math.sqrt(norm2))


def _displacement_padding(beta: complex, field_dim: int) -> int:
    return int(math.ceil(4.0 * abs(beta) * math.sqrt(field_dim))) + 30


def displacement_exact(beta: complex, field_dim: int, padding: int | None = None) -> np.ndarray:
    """``D(beta) = exp(beta a^dag - beta^* a)`` by spectral exponentiation.

    The exponential is formed in a space enlarged by ``padding`` levels and
    cropped back to ``field_dim``, so the retained block matches the infinite
    dimensional operator. ``padding=0`` returns the exponential of the
    truncated generator, which is exactly unitary but distorted near the edge.
    """
    beta = complex(beta)
    if abs(beta) ** 2 > field_dim / 10:
        warnings.warn(f"|beta|^2 = {abs(beta)**2:.3g} is large for field_dim={field_dim}",
                      RuntimeWarning, stacklevel=2)
    if padding is None:
        padding = _displacement_padding(beta, field_dim)
    big = field_dim + int(padding)
    a, a_dag, _ = ladder_operators(big)
    # D = exp(-i G) with Hermitian G = i (beta a^dag - beta^* a)
    gen = 1j * (beta * a_dag - np.conj(beta) * a)
    d = expm_hermitian_scaled(gen, -1j, eig=herm_eig(gen))
    return d[:field_dim, :field_dim].copy()


def displacement_laguerre(beta: complex, m: int, n: int) -> complex:
    """Matrix element ``<m|D(beta)|n>`` from the associated Laguerre closed form."""
    if m < 0 or n < 0:
        raise IndexOutOfRange("Fock indices must be non-negative")
    beta = complex(beta)
    x = abs(beta) ** 2
    if beta == 0:
        return 1.0 + 0j if m == n else 0j
    lo, k = min(m, n), abs(m - n)
    logpref = -0.5 * x + k * math.log(abs(beta)) + 0.5 * (gammaln(lo + 1.0) - gammaln(lo + k + 1.0))
    phase = np.exp(1j * k * np.angle(beta)) if m >= n else (-1.0) ** k * np.exp(-1j * k * np.angle(beta))
    return complex(math.exp(logpref) * eval_genlaguerre(lo, k, x) * phase)


def displacement_matrix(beta: complex, field_dim: int) -> np.ndarray:
    """Dense ``<m|D(beta)|n>`` block via the Laguerre-function recurrence."""
    return kernels.displacement_matrix(complex(beta), int(field_dim))


class AtomicOperators(NamedTuple):
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    sigma_z: np.ndarray
    sigma_x: np.ndarray


def _embed(layout: HilbertLayout, factor: int, op: np.ndarray) -> np.ndarray:
    mats = [np.eye(d, dtype=np.complex128) for d in layout.dims]
    mats[factor] = op
    return kron_all(mats)


def embed_field(layout: HilbertLayout, op: np.ndarray) -> np.ndarray:
    """Field operator acting as identity on every atom."""
    return np.kron(np.asarray(op, dtype=np.complex128), np.eye(layout.atom_dim))


def atomic_operators(layout: HilbertLayout, atom_index: int) -> AtomicOperators:
    if not 0 <= atom_index < layout.atom_count:
        raise IndexOutOfRange(f"atom {atom_index} not in 0..{layout.atom_count - 1}")
    f = atom_index + 1
    return AtomicOperators(*(_embed(layout, f, m) for m in (SIGMA_PLUS, SIGMA_MINUS, SIGMA_Z, SIGMA_X)))


def sparse_atomic_lowering(layout: HilbertLayout, atom_index: int) -> sp.csr_matrix:
    mats = [sp.identity(d, dtype=np.complex128, format="csr") for d in layout.dims]
    mats[atom_index + 1] = sp.csr_matrix(SIGMA_MINUS)
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


def collective_sx(layout: HilbertLayout) -> np.ndarray:
    """Sum of single-atom ``sigma_x`` on the composite space."""
    out = np.zeros((layout.total_dim,) * 2, dtype=np.complex128)
    for i in range(layout.atom_count):
        out += _embed(layout, i + 1, SIGMA_X)
    return out


def protocol_atomic_state(n_atoms: int) -> np.ndarray:
    """Initial atomic ket (atom factors only) that seeds a Fock-like field.

    Each is an equal superposition of the extreme ``S_x`` eigenstates
    ``lambda = +N`` and ``lambda = -N``.
    """
    e, g = KET_E, KET_G
    if n_atoms == 1:
        return e.copy()
    if n_atoms == 2:
        return (np.kron(g, g) + np.kron(e, e)) / math.sqrt(2.0)
    if n_atoms == 3:
        return (np.kron(np.kron(e, e), e) + np.kron(np.kron(e, g), g)
                + np.kron(np.kron(g, e), g) + np.kron(np.kron(g, g), e)) / 2.0
    raise UnsupportedAtomCount(f"protocol states exist for 1-3 atoms, got {n_atoms}")


def initial_state(spec: CoherentSpec, n_atoms: int, field_dim: int) -> QuantumState:
    """``|alpha> (x) |phi_at>`` on the composite layout."""
    field = coherent_state(spec, field_dim).data
    return QuantumState(HilbertLayout(field_dim, n_atoms), np.kron(field, protocol_atomic_state(n_atoms)))
