"""Time evolution under the resonant atom-field interaction.

Times are expressed in units of ``1/g``; with the default ``g = 1`` every
``t`` is the dimensionless ``g t``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DimensionMismatch, StepSizeTooLarge, TruncationTooSmall
from .hilbert import (CoherentSpec, HilbertLayout, QuantumState, coherent_amplitudes,
                      sparse_atomic_lowering)
from .linalg import EigenDecomposition, herm_eig

DEFAULT_DT = 1e-3
TRACE_DRIFT_TARGET = 1e-8
TRACE_DRIFT_LIMIT = 1e-6
MAX_HALVINGS = 4


@dataclass(frozen=True)
class DecoherenceSpec:
    """Cavity decay ``kappa``, atomic decay ``gamma`` (units of g) and thermal occupancy."""

    kappa: float = 0.0
    gamma: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if min(self.kappa, self.gamma, self.n_th) < 0:
            raise ValueError("decoherence rates and n_th must be non-negative")

    @property
    def is_lossless(self) -> bool:
        return self.kappa == 0 and self.gamma == 0

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "gamma": self.gamma, "n_th": self.n_th}


def _sparse_field_lowering(layout: HilbertLayout) -> sp.csr_matrix:
    a = sp.diags(np.sqrt(np.arange(1, layout.field_dim, dtype=float)), 1, format="csr")
    return sp.kron(a, sp.identity(layout.atom_dim), format="csr").astype(np.complex128)


class InteractionHamiltonian:
    """``H = g sum_i (a sigma_+^(i) + a^dag sigma_-^(i))`` with a cached spectrum."""

    def __init__(self, layout: HilbertLayout, g: float = 1.0):
        self.layout = layout
        self.g = float(g)
        a = _sparse_field_lowering(layout)
        h = sp.csr_matrix((layout.total_dim,) * 2, dtype=np.complex128)
        for i in range(layout.atom_count):
            sm = sparse_atomic_lowering(layout, i)
            h = h + a @ sm.conj().T + a.conj().T @ sm
        self.sparse = (self.g * h).tocsr()
        self._eig: EigenDecomposition | None = None

    @property
    def matrix(self) -> np.ndarray:
        return self.sparse.toarray()

    @property
    def eig(self) -> EigenDecomposition:
        if self._eig is None:
            self._eig = herm_eig(self.matrix)
        return self._eig


def build_h_int(layout: HilbertLayout, g: float = 1.0) -> InteractionHamiltonian:
    return InteractionHamiltonian(layout, g)


def excitation_number(layout: HilbertLayout) -> np.ndarray:
    """``a^dag a + sum_i sigma_+^(i) sigma_-^(i)`` (diagonal in this basis)."""
    nf = np.repeat(np.arange(layout.field_dim, dtype=float), layout.atom_dim)
    # atom basis index bit = 0 for |e>, so count zero bits
    idx = np.arange(layout.atom_dim)
    n_exc = np.array([layout.atom_count - bin(i).count("1") for i in idx], dtype=float)
    return np.diag(nf + np.tile(n_exc, layout.field_dim)).astype(np.complex128)


def _check_layout(state: QuantumState, h: InteractionHamiltonian):
    if state.layout != h.layout:
        raise DimensionMismatch(f"state layout {state.layout} != Hamiltonian layout {h.layout}")


def evolve_unitary(state: QuantumState, h: InteractionHamiltonian, t: float) -> QuantumState:
    """Exact propagation ``exp(-i H t)`` using the cached eigendecomposition."""
    _check_layout(state, h)
    eig = h.eig
    v = eig.eigenvectors
    phases = np.exp(-1j * eig.eigenvalues * float(t))
    if state.is_pure:
        return QuantumState(state.layout, v @ (phases * (v.conj().T @ state.data)))
    u = (v * phases) @ v.conj().T
    return QuantumState(state.layout, u @ state.data @ u.conj().T)


def unitary_trajectory(state: QuantumState, h: InteractionHamiltonian, times: Sequence[float]) -> np.ndarray:
    """Pure-state vectors at each time, shape ``(len(times), dim)``."""
    _check_layout(state, h)
    eig = h.eig
    c0 = eig.eigenvectors.conj().T @ state.data
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), eig.eigenvalues))
    return (phases * c0[None, :]) @ eig.eigenvectors.T


def closed_form_single_atom(spec: CoherentSpec, t: float, layout: HilbertLayout, g: float = 1.0) -> QuantumState:
    """Analytic state for one atom starting in ``|e>`` and a coherent field.

    ``|psi(t)> = sum_n C_n |n> (cos(g t sqrt(n+1)) |e> - i (sqrt(n)/alpha) sin(g t sqrt(n)) |g>)``
    """
    if layout.atom_count != 1:
        raise DimensionMismatch("closed form applies to a single atom")
    d = layout.field_dim
    c = coherent_amplitudes(spec.alpha, d)
    norm2 = float(np.sum(np.abs(c) ** 2))
    if 1.0 - norm2 > 1e-8:
        raise TruncationTooSmall(f"field_dim={d} too small for |alpha|^2={spec.nbar:g}")
    c = c / math.sqrt(norm2)
    n = np.arange(d)
    gt = g * float(t)
    psi = np.empty((d, 2), dtype=np.complex128)
    psi[:, 0] = c * np.cos(gt * np.sqrt(n + 1.0))
    # (sqrt(n)/alpha) C_n == C_{n-1}
    psi[0, 1] = 0.0
    psi[1:, 1] = -1j * c[:-1] * np.sin(gt * np.sqrt(n[1:]))
    return QuantumState(layout, psi.ravel())


def closed_form_field_amplitudes(spec: CoherentSpec, t: float, field_dim: int, g: float = 1.0) -> np.ndarray:
    """``(field_dim, 2)`` array of field amplitudes paired with ``|e>`` and ``|g>``."""
    return closed_form_single_atom(spec, t, HilbertLayout(field_dim, 1), g).data.reshape(field_dim, 2)


def _monomial_form(op: sp.csr_matrix):
    """(column, value) per row for an operator with at most one nonzero per row."""
    op = sp.csr_matrix(op)
    op.eliminate_zeros()
    counts = np.diff(op.indptr)
    if np.any(counts > 1):
        raise ValueError("jump operator has more than one nonzero per row")
    dim = op.shape[0]
    cols = np.zeros(dim, dtype=np.int64)
    vals = np.zeros(dim, dtype=np.complex128)
    rows = np.nonzero(counts)[0]
    cols[rows] = op.indices[op.indptr[rows]]
    vals[rows] = op.data[op.indptr[rows]]
    return cols, vals


def collapse_operators(layout: HilbertLayout, dec: DecoherenceSpec) -> list:
    """Sparse jump operators: cavity loss/gain and per-atom decay/excitation."""
    ops = []
    a = _sparse_field_lowering(layout)
    if dec.kappa > 0:
        ops.append(math.sqrt(dec.kappa * (dec.n_th + 1.0)) * a)
        if dec.n_th > 0:
            ops.append(math.sqrt(dec.kappa * dec.n_th) * a.conj().T.tocsr())
    if dec.gamma > 0:
        for i in range(layout.atom_count):
            sm = sparse_atomic_lowering(layout, i)
            ops.append(math.sqrt(dec.gamma * (dec.n_th + 1.0)) * sm)
            if dec.n_th > 0:
                ops.append(math.sqrt(dec.gamma * dec.n_th) * sm.conj().T.tocsr())
    return [sp.csr_matrix(o) for o in ops]


class LindbladSolver:
    """Fixed-step RK4 integrator for the master equation on dense ``rho``.

    The generator is ``-i[H, rho] + sum_c (c rho c^dag - {c^dag c, rho}/2)``;
    no superoperator is formed.
    """

    def __init__(self, h: InteractionHamiltonian, dec: DecoherenceSpec, dt: float = DEFAULT_DT):
        self.h = h
        self.dec = dec
        self.dt = float(dt)
        layout = h.layout
        jumps = collapse_operators(layout, dec)
        heff = h.sparse.astype(np.complex128)
        for c in jumps:
            heff = heff - 0.5j * (c.conj().T @ c)
        heff = sp.csr_matrix(heff)
        heff.sort_indices()
        self._hdata = heff.data.astype(np.complex128)
        self._hind = heff.indices.astype(np.int64)
        self._hptr = heff.indptr.astype(np.int64)
        forms = [_monomial_form(c) for c in jumps]
        dim = layout.total_dim
        self._jcols = np.array([f[0] for f in forms], dtype=np.int64).reshape(-1, dim)
        self._jvals = np.array([f[1] for f in forms], dtype=np.complex128).reshape(-1, dim)

    def _propagate(self, rho: np.ndarray, duration: float, dt: float) -> np.ndarray:
        if duration <= 0:
            return rho
        nsteps = max(1, int(math.ceil(duration / dt - 1e-9)))
        return kernels.lindblad_rk4(rho, self._hdata, self._hind, self._hptr,
                                    self._jcols, self._jvals, duration / nsteps, nsteps)

    def advance(self, rho: np.ndarray, duration: float) -> np.ndarray:
        """Evolve ``rho`` by ``duration``; halve the step while trace drift exceeds 1e-8."""
        tr0 = np.trace(rho).real
        dt = self.dt
        for _ in range(MAX_HALVINGS + 1):
            out = self._propagate(rho, duration, dt)
            drift = abs(np.trace(out).real - tr0)
            if drift < TRACE_DRIFT_TARGET:
                return out
            dt *= 0.5
        # written so that a NaN drift (blow-up) also raises
        if not drift <= TRACE_DRIFT_LIMIT:
            raise StepSizeTooLarge(f"trace drift {drift:.2e} at dt={dt * 2:.2e}")
        return out


def evolve_lindblad(rho0: QuantumState, h: InteractionHamiltonian, dec: DecoherenceSpec,
                    t_grid: Sequence[float], dt: float = DEFAULT_DT) -> list:
    """Density matrices at each time of the ascending ``t_grid`` (which starts at 0).

    Raises
    ------
    StepSizeTooLarge
        If the accumulated trace drift exceeds 1e-6.
    """
    _check_layout(rho0, h)
    grid = np.asarray(t_grid, dtype=float)
    if grid.size == 0 or grid[0] != 0 or np.any(np.diff(grid) < 0):
        raise ValueError("t_grid must be ascending and start at 0")
    solver = LindbladSolver(h, dec, dt)
    rho = rho0.density_matrix().astype(np.complex128)
    tr0 = np.trace(rho).real
    out = [QuantumState(rho0.layout, rho.copy())]
    for t_prev, t_next in zip(grid[:-1], grid[1:]):
        rho = solver.advance(rho, t_next - t_prev)
        if not abs(np.trace(rho).real - tr0) <= TRACE_DRIFT_LIMIT:
            raise StepSizeTooLarge(f"trace drift {abs(np.trace(rho).real - tr0):.2e}")
        out.append(QuantumState(rho0.layout, rho.copy()))
    return out


class LindbladTrajectory:
    """Single trajectory with checkpoints for repeated queries at scattered times.

    ``state_at(t)`` integrates forward from the latest stored checkpoint not
    after ``t``; ``checkpoint_every`` controls how densely new checkpoints are
    laid down while integrating.
    """

    def __init__(self, solver: LindbladSolver, rho0: np.ndarray, checkpoint_every: float = 0.05):
        self.solver = solver
        self.checkpoint_every = float(checkpoint_every)
        rho0 = np.array(rho0, dtype=np.complex128)
        self._times = [0.0]
        self._states = [rho0]
        self.trace0 = float(np.trace(rho0).real)

    def state_at(self, t: float) -> np.ndarray:
        t = float(t)
        if t < 0:
            raise ValueError("t must be non-negative")
        i = bisect.bisect_right(self._times, t + 1e-12) - 1
        tc, rho = self._times[i], self._states[i]
        h = self.checkpoint_every
        # advance checkpoint by checkpoint, storing as we go
        while t - tc > h + 1e-12:
            tn = tc + h
            rho = self.solver.advance(rho, h)
            j = bisect.bisect_left(self._times, tn)
            if j == len(self._times) or abs(self._times[j] - tn) > 1e-12:
                self._times.insert(j, tn)
                self._states.insert(j, rho)
            tc = tn
        out = self.solver.advance(rho, t - tc)
        if not abs(np.trace(out).real - self.trace0) <= TRACE_DRIFT_LIMIT:
            raise StepSizeTooLarge("trace drift exceeded 1e-6")
        return out


class Energies(NamedTuple):
    field: float
    atomic: float
    interaction: float
    total: float


def energy_expectations(state: QuantumState, layout: HilbertLayout | None = None, g: float = 1.0) -> Energies:
    """``<a^dag a>``, ``<sum sigma_+ sigma_->``, ``<H_int>/g`` and their sum (units of hbar g)."""
    layout = layout or state.layout
    if state.layout != layout:
        raise DimensionMismatch("state does not live on the given layout")
    nexc_diag = np.real(np.diag(excitation_number(layout)))
    nf = np.repeat(np.arange(layout.field_dim, dtype=float), layout.atom_dim)
    na = nexc_diag - nf
    hint = InteractionHamiltonian(layout, 1.0).sparse
    if state.is_pure:
        p = np.abs(state.data) ** 2
        field, atomic = float(p @ nf), float(p @ na)
        inter = float(np.vdot(state.data, hint @ state.data).real)
    else:
        diag = np.real(np.diag(state.data))
        field, atomic = float(diag @ nf), float(diag @ na)
        inter = float(np.real(np.sum(hint.multiply(state.data.T))))
    return Energies(field, atomic, inter, field + atomic + inter)
