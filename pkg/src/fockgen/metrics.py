"""State-comparison and characterization functionals.

Wigner convention: ``W(x, p) = (1/pi) Tr[rho D(alpha) P D(alpha)^dag]`` with
``alpha = (x + i p)/sqrt(2)`` and parity ``P = sum (-1)^n |n><n|``, so that
``int W dx dp = 1``, the vacuum peaks at ``1/pi`` and ``|W| <= 1/pi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import kernels
from .errors import DimensionMismatch, GridTooCoarse
from .hilbert import CoherentSpec, QuantumState, coherent_amplitudes
from .linalg import sqrtm_psd, trace_norm

WIGNER_CONVENTION = "W(x,p) = (1/pi) Tr[rho D(a) P D(a)^dag], a = (x + i p)/sqrt(2), int W dx dp = 1"
ENVELOPE_CUTOFF = 1e-16


def _data(state) -> np.ndarray:
    return np.asarray(getattr(state, "data", state), dtype=np.complex128)


def _as_dm(x: np.ndarray) -> np.ndarray:
    return np.outer(x, x.conj()) if x.ndim == 1 else x


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``[Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2``.

    Either argument may be a pure vector, in which case the overlap form
    ``<phi|rho|phi>`` is used.
    """
    a, b = _data(rho), _data(sigma)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimensions {a.shape} and {b.shape} differ")
    if a.ndim == 1 and b.ndim == 1:
        return float(abs(np.vdot(a, b)) ** 2)
    if b.ndim == 1:
        a, b = b, a
    if a.ndim == 1:
        return float(np.clip(np.vdot(a, b @ a).real, 0.0, 1.0))
    # Tr sqrt(sqrt(a) b sqrt(a)) is the nuclear norm of sqrt(a) sqrt(b); the
    # SVD route avoids square-rooting round-off eigenvalues of rank-deficient states
    sv = np.linalg.svd(sqrtm_psd(a) @ sqrtm_psd(b), compute_uv=False)
    return float(min(np.sum(sv) ** 2, 1.0))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    a, b = _data(rho), _data(sigma)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimensions {a.shape} and {b.shape} differ")
    return min(0.5 * trace_norm(_as_dm(a) - _as_dm(b)), 1.0)


def purity(rho) -> float:
    a = _data(rho)
    if a.ndim == 1:
        return 1.0
    return float(np.sum(np.abs(a) ** 2))


def photon_distribution(rho_field) -> np.ndarray:
    """Fock-basis populations ``p_n = <n|rho|n>`` of the field."""
    if isinstance(rho_field, QuantumState) and rho_field.layout.atom_count:
        rho_field = rho_field.field_state()
    a = _data(rho_field)
    p = np.abs(a) ** 2 if a.ndim == 1 else np.real(np.diag(a))
    return np.clip(p, 0.0, None)


@dataclass
class WignerGrid:
    """``values[i, j] = W(x_axis[i], p_axis[j])``."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        dx = self.x_axis[1] - self.x_axis[0] if self.x_axis.size > 1 else 1.0
        dp = self.p_axis[1] - self.p_axis[0] if self.p_axis.size > 1 else 1.0
        return float(np.sum(self.values) * dx * dp)

    def peak(self) -> tuple:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.x_axis[i]), float(self.p_axis[j])


def wigner(rho_field, x_axis, p_axis=None, check: bool = True) -> WignerGrid:
    """Sample the Wigner function of a field state on a rectangular grid."""
    if isinstance(rho_field, QuantumState) and rho_field.layout.atom_count:
        rho_field = rho_field.field_state()
    rho = _as_dm(_data(rho_field))
    x = np.asarray(x_axis, dtype=float)
    p = x if p_axis is None else np.asarray(p_axis, dtype=float)
    xx, pp = np.meshgrid(x, p, indexing="ij")
    alphas = (xx + 1j * pp) / math.sqrt(2.0)
    w = kernels.wigner_parity(0.5 * (rho + rho.conj().T), alphas.ravel()).reshape(xx.shape)
    grid = WignerGrid(x, p, w)
    if check and x.size > 1 and p.size > 1:
        total = grid.integral()
        if abs(total - 1.0) > 5e-2:
            warnings.warn(f"Wigner integral {total:.4f} deviates from 1", GridTooCoarse, stacklevel=2)
    return grid


def _displacement_column(beta: complex, m: int, ns: np.ndarray) -> np.ndarray:
    """``<m|D(beta)|n>`` for the Fock indices ``ns`` (scipy Laguerre, log-space factorials)."""
    beta = complex(beta)
    ns = np.asarray(ns, dtype=int)
    if beta == 0:
        return (ns == m).astype(np.complex128)
    x = abs(beta) ** 2
    lo = np.minimum(m, ns)
    k = np.abs(ns - m)
    logpref = -0.5 * x + k * math.log(abs(beta)) + 0.5 * (gammaln(lo + 1.0) - gammaln(lo + k + 1.0))
    th = np.angle(beta)
    phase = np.where(m >= ns, np.exp(1j * k * th), (-1.0) ** k * np.exp(-1j * k * th))
    return np.exp(logpref) * eval_genlaguerre(lo, k, x) * phase


def f_matrix_element(spec: CoherentSpec, beta: float, t: float, m: int, l: int,
                     field_dim: int | None = None, g: float = 1.0) -> complex:
    """Field density element ``<m| D(beta) rho_f(t) D(beta)^dag |l>`` for one atom from ``|e>``.

    Evaluated as the explicit double sum over photon numbers ``(n, n')``
    restricted to where the Poisson envelope exceeds 1e-16 of its peak.
    """
    nbar = spec.nbar
    if field_dim is None:
        field_dim = int(max(2.5 * nbar + 12 * math.sqrt(nbar + 1) + 40, m + 40, l + 40))
    c = coherent_amplitudes(spec.alpha, field_dim + 1)
    c = c / math.sqrt(np.sum(np.abs(c[:field_dim]) ** 2))
    keep = np.nonzero(np.abs(c) >= ENVELOPE_CUTOFF * np.max(np.abs(c)))[0]
    ns = np.arange(keep.min(), min(keep.max() + 2, field_dim))
    phase = np.exp(1j * np.angle(spec.alpha)) if spec.alpha != 0 else 1.0
    b = complex(beta) * phase
    dm = _displacement_column(b, m, ns)
    dl = _displacement_column(b, l, ns)
    gt = g * float(t)
    cos_amp = c[ns] * np.cos(gt * np.sqrt(ns + 1.0))
    prev = np.where(ns > 0, c[np.maximum(ns - 1, 0)], 0.0)
    sin_amp = prev * np.sin(gt * np.sqrt(ns.astype(float)))
    total = 0j
    for i in range(ns.size):
        w_i = dm[i]
        for j in range(ns.size):
            total += w_i * np.conj(dl[j]) * (cos_amp[i] * np.conj(cos_amp[j])
                                             + sin_amp[i] * np.conj(sin_amp[j]))
    return complex(total)
