"""Search for the interaction time and displacement that best produce ``|n>``.

Displacement convention: ``beta`` is the amplitude of the correcting
displacement ``D(beta)`` applied to the field after the interaction, in the
frame where ``alpha`` is real. With this convention the single-atom optima
for ``n = 5`` are ``beta = +0.649`` on branch ``l = 1`` and ``-0.477`` on
``l = 2``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dynamics import (DEFAULT_DT, DecoherenceSpec, InteractionHamiltonian, LindbladSolver,
                       LindbladTrajectory, closed_form_field_amplitudes)
from .errors import NoImprovement, UnsupportedAtomCount, ZeroProbabilityOutcome
from .hilbert import (CoherentSpec, HilbertLayout, QuantumState, default_field_dim,
                      displacement_matrix, initial_state)
from .metrics import purity as _purity

SUPPORTED_ATOMS = (1, 2, 3)
DEFAULT_BRANCHES = (0, 1, 2, 3)
METRICS = ("trace", "fidelity")
COARSE_POINTS = 41
BETA_WINDOW = 0.3
REFINE_PEAKS = 3
TIE_TOL = 1e-8
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def analytic_tau(n: int, l: int, n_atoms: int = 1) -> float:
    """Branch time ``(2l+1)(pi/2)(sqrt(n+1)+sqrt(n))/N`` in units of ``1/g``."""
    if n_atoms not in SUPPORTED_ATOMS:
        raise UnsupportedAtomCount(f"n_atoms must be one of {SUPPORTED_ATOMS}")
    if n < 0 or l < 0:
        raise ValueError("n and l must be non-negative")
    return (2 * l + 1) * (math.pi / 2.0) * (math.sqrt(n + 1.0) + math.sqrt(n)) / n_atoms


def beta_fit_coefficients(l: int) -> tuple:
    """Intercept and slope of the single-atom displacement fit on branch ``l``."""
    if l % 2 == 1:
        a = 0.13 + 1.0 / (1.07 + 10.3 * l)
    else:
        a = -0.08 - 1.0 / (2.65 + 2.6 * l)
    b = (-1.0) ** (l + 1) * (-0.0018 + 0.016 / (-0.25 + l))
    return a, b


def beta_seed(n: int, l: int) -> float:
    """Fitted displacement for target ``n`` on branch ``l``, clamped to [-1, 1].

    The fit is calibrated for ``l >= 1``; ``l = 0`` is evaluated from the
    same formula but is a poor predictor there.
    """
    a, b = beta_fit_coefficients(l)
    return float(np.clip(a + b * analytic_tau(n, l, 1), -1.0, 1.0))


@dataclass(frozen=True)
class BranchSeed:
    l: int
    g_tau: float
    beta_seed: float

    @classmethod
    def make(cls, n: int, l: int, n_atoms: int) -> "BranchSeed":
        return cls(l, analytic_tau(n, l, n_atoms), beta_seed(n, l))


def atomic_outcome_index(outcome, n_atoms: int) -> int:
    """Index of an atomic basis state given as ``"e"``, ``"eg"``, ... or an int."""
    if isinstance(outcome, (int, np.integer)):
        idx = int(outcome)
    else:
        s = str(outcome).strip().lower()
        if len(s) != n_atoms or set(s) - {"e", "g"}:
            raise ValueError(f"outcome {outcome!r} is not a {n_atoms}-atom e/g label")
        idx = int("".join("0" if ch == "e" else "1" for ch in s), 2)
    if not 0 <= idx < 2 ** n_atoms:
        raise ValueError(f"outcome index {idx} out of range")
    return idx


def outcome_label(idx: int, n_atoms: int) -> str:
    return "".join("e" if b == "0" else "g" for b in format(idx, f"0{n_atoms}b"))


def post_select(composite_final: QuantumState, outcome) -> tuple:
    """Project the atoms on a basis ``outcome`` and renormalize the field.

    Returns
    -------
    (QuantumState, float)
        Conditional field state and the success probability.
    """
    layout = composite_final.layout
    idx = atomic_outcome_index(outcome, layout.atom_count)
    fl = layout.field_only()
    if composite_final.is_pure:
        col = composite_final.data.reshape(layout.field_dim, layout.atom_dim)[:, idx]
        p = float(np.vdot(col, col).real)
        if p < 1e-14:
            raise ZeroProbabilityOutcome(f"outcome {outcome!r} has probability {p:.2e}")
        return QuantumState(fl, col / math.sqrt(p)), p
    r = composite_final.data.reshape(layout.field_dim, layout.atom_dim, layout.field_dim, layout.atom_dim)
    block = r[:, idx, :, idx]
    p = float(np.trace(block).real)
    if p < 1e-14:
        raise ZeroProbabilityOutcome(f"outcome {outcome!r} has probability {p:.2e}")
    return QuantumState(fl, block / p), p


def _fock_scores_lowrank(phi: np.ndarray, n: int) -> tuple:
    """(1 - delta, fidelity, purity) of ``rho = phi phi^dag`` against ``|n><n|``.

    The nonzero spectrum of ``rho - |n><n|`` is read off a small Gram matrix.
    """
    e = np.zeros(phi.shape[0], dtype=np.complex128)
    e[n] = 1.0
    m = np.column_stack([phi, e])
    gram = m.conj().T @ m
    w, v = np.linalg.eigh(0.5 * (gram + gram.conj().T))
    w = np.clip(w, 0.0, None)
    half = v * np.sqrt(w)
    s = np.ones(m.shape[1])
    s[-1] = -1.0
    core = half.conj().T @ (s[:, None] * half)
    lam = np.linalg.eigvalsh(0.5 * (core + core.conj().T))
    delta = min(0.5 * float(np.sum(np.abs(lam))), 1.0)
    fid = float(np.sum(np.abs(phi[n]) ** 2))
    pg = phi.conj().T @ phi
    return 1.0 - delta, fid, float(np.sum(np.abs(pg) ** 2))


def _fock_scores_dense(rho: np.ndarray, n: int) -> tuple:
    r = rho.copy()
    r[n, n] -= 1.0
    lam = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
    delta = min(0.5 * float(np.sum(np.abs(lam))), 1.0)
    return 1.0 - delta, float(rho[n, n].real), float(np.sum(np.abs(rho) ** 2))


class FockProtocol:
    """Evaluator of the corrected field state for one (spec, atoms, target) setting.

    Parameters
    ----------
    spec : CoherentSpec
        Initial coherent field.
    n_atoms : int
        Number of two-level systems, prepared in the protocol state.
    target_n : int
        Fock state sought.
    dec : DecoherenceSpec, optional
        If given with nonzero rates, the Lindblad path is used.
    field_dim : int, optional
        Fock truncation; defaults to ``default_field_dim(nbar)`` (and at least
        ``target_n + 12``).
    metric : {"trace", "fidelity"}
        Quantity maximized: ``1 - delta`` or the Fock population.
    post_select : str or int, optional
        Atomic outcome conditioning the field.
    fast_path : bool, optional
        Use the analytic single-atom state instead of the eigenbasis
        propagator. Defaults to True when one atom evolves losslessly.
    """

    def __init__(self, spec: CoherentSpec, n_atoms: int, target_n: int,
                 dec: DecoherenceSpec | None = None, field_dim: int | None = None,
                 metric: str = "trace", post_select=None, fast_path: bool | None = None,
                 g: float = 1.0, dt: float = DEFAULT_DT, checkpoint_every: float = 0.05):
        if n_atoms not in SUPPORTED_ATOMS:
            raise UnsupportedAtomCount(f"n_atoms must be one of {SUPPORTED_ATOMS}")
        if metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        self.spec = spec
        self.n_atoms = n_atoms
        self.target_n = int(target_n)
        self.dec = dec if dec is not None and not dec.is_lossless else None
        self.requested_dec = dec
        self.field_dim = int(field_dim or max(default_field_dim(spec.nbar), self.target_n + 12))
        self.metric = metric
        self.post_select = post_select
        self.g = g
        self.dt = dt
        self.layout = HilbertLayout(self.field_dim, n_atoms)
        self.lossy = self.dec is not None
        if fast_path is None:
            fast_path = n_atoms == 1 and not self.lossy
        if fast_path and (n_atoms != 1 or self.lossy):
            raise ValueError("fast path requires a single atom without decoherence")
        self.fast_path = fast_path
        self._phase = np.exp(1j * np.angle(spec.alpha)) if spec.alpha != 0 else 1.0
        self._outcome = None if post_select is None else atomic_outcome_index(post_select, n_atoms)
        self.psi0 = initial_state(spec, n_atoms, self.field_dim)
        self.n_evals = 0
        if self.lossy:
            self.h = InteractionHamiltonian(self.layout, g)
            self._traj = LindbladTrajectory(LindbladSolver(self.h, self.dec, dt),
                                            self.psi0.density_matrix(), checkpoint_every)
        elif not fast_path:
            self.h = InteractionHamiltonian(self.layout, g)
            eig = self.h.eig
            self._v = eig.eigenvectors
            self._lam = eig.eigenvalues
            self._c0 = self._v.conj().T @ self.psi0.data
        self._cache_t = None

    # -- states -------------------------------------------------------------
    def composite(self, t: float) -> QuantumState:
        """Joint atom-field state at time ``t`` (before any displacement)."""
        t = float(t)
        if self.lossy:
            return QuantumState(self.layout, self._traj.state_at(t))
        if self.fast_path:
            amps = closed_form_field_amplitudes(self.spec, t, self.field_dim, self.g)
            return QuantumState(self.layout, amps.ravel())
        return QuantumState(self.layout, self._v @ (np.exp(-1j * self._lam * t) * self._c0))

    def _field_factor(self, t: float):
        """Either ``("pure", Phi)`` with ``rho_f = Phi Phi^dag`` or ``("mixed", rho_f)``, plus success probability."""
        if self._cache_t is not None and self._cache_t[0] == t:
            return self._cache_t[1]
        st = self.composite(t)
        d, na = self.field_dim, self.layout.atom_dim
        if st.is_pure:
            phi = st.data.reshape(d, na)
            prob = 1.0
            if self._outcome is not None:
                col = phi[:, self._outcome]
                prob = float(np.vdot(col, col).real)
                if prob < 1e-14:
                    raise ZeroProbabilityOutcome("post-selected outcome has zero probability")
                phi = col[:, None] / math.sqrt(prob)
            out = ("pure", phi, prob)
        else:
            if self._outcome is not None:
                fs, prob = post_select(st, self._outcome)
                rho = fs.data
            else:
                rho = st.field_state().data
                prob = 1.0
            out = ("mixed", rho, prob)
        self._cache_t = (t, out)
        return out

    def displacement(self, beta: float) -> np.ndarray:
        return displacement_matrix(complex(beta) * self._phase, self.field_dim)

    def field_state(self, t: float, beta: float) -> QuantumState:
        """Corrected field state ``D(beta) rho_f(t) D(beta)^dag``."""
        kind, x, _ = self._field_factor(float(t))
        dmat = self.displacement(beta)
        if kind == "pure":
            phi = dmat @ x
            rho = phi @ phi.conj().T
        else:
            rho = dmat @ x @ dmat.conj().T
        return QuantumState(self.layout.field_only(), rho)

    def scores(self, t: float, beta: float) -> dict:
        """``one_minus_delta``, ``fidelity``, ``purity`` and ``probability`` at ``(t, beta)``."""
        self.n_evals += 1
        kind, x, prob = self._field_factor(float(t))
        dmat = self.displacement(beta)
        if kind == "pure":
            s = _fock_scores_lowrank(dmat @ x, self.target_n)
        else:
            s = _fock_scores_dense(dmat @ x @ dmat.conj().T, self.target_n)
        return {"one_minus_delta": s[0], "fidelity": s[1], "purity": s[2], "probability": prob}

    def value(self, t: float, beta: float) -> float:
        s = self.scores(t, beta)
        return s["one_minus_delta"] if self.metric == "trace" else s["fidelity"]

    def baseline(self) -> float:
        return self.value(0.0, 0.0)


def objective(spec: CoherentSpec, n_atoms: int, t: float, beta: float, target_n: int,
              dec: DecoherenceSpec | None = None, metric: str = "trace", **kwargs) -> float:
    """``1 - delta`` (or fidelity) of the corrected field against ``|target_n>``."""
    return FockProtocol(spec, n_atoms, target_n, dec=dec, metric=metric, **kwargs).value(t, beta)


# -- optimizers -------------------------------------------------------------

def golden_section_max(f, lo: float, hi: float, tol: float = 1e-5, max_iter: int = 200) -> tuple:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def nelder_mead_max(f, x0: Sequence[float], steps: Sequence[float], ftol: float = 1e-6,
                    xtol: float = 1e-5, max_iter: int = 2000, bounds=None) -> tuple:
    """Nelder-Mead maximization from an axis-aligned simplex of size ``steps``.

    ``bounds`` is an optional sequence of ``(lo, hi)`` pairs; the search is
    kept inside that box.
    """
    x0 = np.asarray(x0, dtype=float)
    simplex = [x0] + [x0 + np.eye(x0.size)[i] * steps[i] for i in range(x0.size)]
    simplex = np.array(simplex)
    if bounds is not None:
        lo, hi = np.array(bounds, dtype=float).T
        simplex = np.clip(simplex, lo, hi)
    res = minimize(lambda x: -f(x), x0, method="Nelder-Mead", bounds=bounds,
                   options={"initial_simplex": simplex, "fatol": ftol,
                            "xatol": xtol, "maxiter": max_iter})
    return res.x, -float(res.fun)


@dataclass
class BranchResult:
    l: int
    seed_tau: float
    seed_beta: float
    g_tau: float
    beta: float
    value: float
    scores: dict

    def to_dict(self) -> dict:
        return {"branch_l": self.l, "seed_g_tau": self.seed_tau, "seed_beta": self.seed_beta,
                "g_tau_f": self.g_tau, "beta_f": self.beta, "objective": self.value, **self.scores}


@dataclass
class ProtocolResult:
    target_n: int
    n_atoms: int
    tau_f: float
    beta_f: float
    branch_l: int
    one_minus_delta: float
    fidelity: float
    purity: float
    lossy: bool
    post_selected: dict | None
    n_bar: float
    metric: str
    field_dim: int
    branches: list = field(default_factory=list)
    field_state: QuantumState | None = None
    problem: FockProtocol | None = field(default=None, repr=False)

    def to_dict(self, include_state: bool = False) -> dict:
        out = {
            "target_n": self.target_n,
            "n_atoms": self.n_atoms,
            "g_tau_f": self.tau_f,
            "beta_f": self.beta_f,
            "branch_l": self.branch_l,
            "one_minus_delta": self.one_minus_delta,
            "fidelity": self.fidelity,
            "purity": self.purity,
            "lossy": self.lossy,
            "post_selected": self.post_selected,
            "extra": {
                "n_bar": self.n_bar,
                "metric": self.metric,
                "field_dim": self.field_dim,
                "branches": [b.to_dict() for b in self.branches],
            },
        }
        if include_state and self.field_state is not None:
            rho = np.asarray(self.field_state.data)
            inter = np.empty(rho.size * 2)
            inter[0::2] = rho.real.ravel()
            inter[1::2] = rho.imag.ravel()
            out["field_state"] = {"layout": self.field_state.layout.to_dict(),
                                  "shape": list(rho.shape), "encoding": "row-major interleaved re,im",
                                  "data": inter.tolist()}
        return out


def _branch_search(problem: FockProtocol, seed: BranchSeed, n_atoms: int,
                   coarse_points: int = COARSE_POINTS, refine_peaks: int = REFINE_PEAKS) -> BranchResult:
    half = math.pi / (2 * n_atoms)
    times = np.linspace(max(seed.g_tau - half, 0.0), seed.g_tau + half, coarse_points)
    lo, hi = seed.beta_seed - BETA_WINDOW, seed.beta_seed + BETA_WINDOW
    # refinement may leave the coarse box by one window, no further
    box = [(max(times[0] - half, 0.0), times[-1] + half), (lo - BETA_WINDOW, hi + BETA_WINDOW)]
    coarse = []
    for t in times:
        b, v = golden_section_max(lambda x: problem.value(t, x), lo, hi)
        coarse.append((t, b, v))
    vals = np.array([c[2] for c in coarse])
    # local maxima of the coarse profile, best first
    peaks = [i for i in range(len(vals))
             if (i == 0 or vals[i] >= vals[i - 1]) and (i == len(vals) - 1 or vals[i] >= vals[i + 1])]
    peaks = sorted(peaks, key=lambda i: -vals[i])[:refine_peaks]
    best = None
    for i in peaks:
        t0, b0, v0 = coarse[i]
        x, v = nelder_mead_max(lambda p: problem.value(p[0], p[1]), (t0, b0), (0.05, 0.02),
                               bounds=box)
        if v < v0:
            x, v = np.array([t0, b0]), v0
        if best is None or v > best[1] + TIE_TOL or (abs(v - best[1]) <= TIE_TOL and x[0] < best[0][0]):
            best = (x, v)
    x, v = best
    return BranchResult(seed.l, seed.g_tau, seed.beta_seed, float(x[0]), float(x[1]), float(v),
                        problem.scores(x[0], x[1]))


def _refine_from(problem: FockProtocol, l: int, tau: float, beta: float) -> BranchResult:
    seed = BranchSeed.make(max(round(problem.spec.nbar), 1), l, problem.n_atoms)
    b, v0 = golden_section_max(lambda x: problem.value(tau, x), beta - 0.1, beta + 0.1)
    box = [(max(tau - 0.5, 0.0), tau + 0.5), (beta - 0.3, beta + 0.3)]
    x, v = nelder_mead_max(lambda p: problem.value(p[0], p[1]), (tau, b), (0.05, 0.02), bounds=box)
    if v < v0:
        x, v = np.array([tau, b]), v0
    return BranchResult(l, seed.g_tau, seed.beta_seed, float(x[0]), float(x[1]), float(v),
                        problem.scores(x[0], x[1]))


def _pick_best(results: Sequence[BranchResult]) -> BranchResult:
    best = None
    for r in results:
        if best is None or r.value > best.value + TIE_TOL:
            best = r
        elif abs(r.value - best.value) <= TIE_TOL and r.g_tau < best.g_tau:
            best = r
    return best


def optimize(spec: CoherentSpec, n_atoms: int, target_n: int, dec: DecoherenceSpec | None = None,
             branches: Sequence[int] = DEFAULT_BRANCHES, metric: str = "trace", post_select=None,
             field_dim: int | None = None, full_search: bool = False, start=None,
             threads: int = 1, fast_path: bool | None = None, dt: float = DEFAULT_DT,
             seed_n: int | None = None) -> ProtocolResult:
    """Optimal interaction time and displacement for producing ``|target_n>``.

    Each branch ``l`` is searched on a 41-point time grid spanning the
    analytic branch time ``+- pi/(2N)``, with a golden-section search of the
    displacement in ``seed +- 0.3`` at every time, followed by joint
    Nelder-Mead refinements started from the three best local maxima of the
    coarse profile. The best branch wins; ties go to the shorter
    time.

    With decoherence, the lossless optimum of each branch (or ``start``, a
    lossless ``ProtocolResult``) is refined directly unless ``full_search``.
    Branch seeds use ``seed_n`` photons, by default ``round(nbar)``.

    Raises
    ------
    NoImprovement
        If no branch beats the undisturbed ``t = 0`` value.
    """
    if target_n < 1:
        raise ValueError("target_n must be >= 1")
    seed_n = int(seed_n if seed_n is not None else max(round(spec.nbar), 1))
    common = dict(field_dim=field_dim, metric=metric, post_select=post_select, dt=dt)
    problem = FockProtocol(spec, n_atoms, target_n, dec=dec, fast_path=fast_path, **common)
    seeds = [BranchSeed.make(seed_n, l, n_atoms) for l in branches]

    if problem.lossy and not full_search:
        if start is None:
            start = optimize(spec, n_atoms, target_n, None, branches, metric, post_select,
                             problem.field_dim, threads=threads, seed_n=seed_n)
        starts = [(b.l, b.g_tau, b.beta) for b in start.branches] or [(start.branch_l, start.tau_f, start.beta_f)]
        results = [_refine_from(problem, l, t, b) for l, t, b in starts]
    else:
        def run(seed):
            # separate evaluators keep per-thread caches independent
            p = problem if threads <= 1 else FockProtocol(spec, n_atoms, target_n, dec=dec,
                                                          fast_path=fast_path, **common)
            return _branch_search(p, seed, n_atoms)

        if threads > 1 and len(seeds) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, seeds))
        else:
            results = [run(s) for s in seeds]

    best = _pick_best(results)
    baseline = problem.baseline()
    if best.value < baseline:
        raise NoImprovement(f"best objective {best.value:.4f} below t=0 baseline {baseline:.4f}")
    fs = problem.field_state(best.g_tau, best.beta)
    ps = None
    if post_select is not None:
        ps = {"outcome": outcome_label(atomic_outcome_index(post_select, n_atoms), n_atoms),
              "probability": best.scores["probability"]}
    return ProtocolResult(
        target_n=int(target_n), n_atoms=n_atoms, tau_f=best.g_tau, beta_f=best.beta,
        branch_l=best.l, one_minus_delta=best.scores["one_minus_delta"],
        fidelity=best.scores["fidelity"], purity=_purity(fs), lossy=problem.lossy,
        post_selected=ps, n_bar=spec.nbar, metric=metric, field_dim=problem.field_dim,
        branches=list(results), field_state=fs, problem=problem)


def truncation_converged(result: ProtocolResult, tol: float = 1e-4) -> tuple:
    """Re-evaluate the optimum with a doubled truncation; returns ``(converged, change)``."""
    p = result.problem
    big = FockProtocol(p.spec, p.n_atoms, p.target_n, dec=p.requested_dec,
                       field_dim=2 * p.field_dim, metric=p.metric, post_select=p.post_select,
                       fast_path=p.fast_path, dt=p.dt)
    change = abs(big.scores(result.tau_f, result.beta_f)["fidelity"] - result.fidelity)
    return change < tol, change


@dataclass
class RobustnessGrid:
    """``fidelity[i, j]`` at ``betas[i]``, ``taus[j]``."""

    betas: np.ndarray
    taus: np.ndarray
    fidelity: np.ndarray


def robustness_sweep(result: ProtocolResult, beta_range: Sequence[float], tau_range: Sequence[float],
                     resolution: Sequence[int] = (41, 41), problem: FockProtocol | None = None) -> RobustnessGrid:
    """Fidelity to ``|n>`` on a ``(beta, g tau)`` grid around an optimum."""
    problem = problem or result.problem
    nb, nt = (int(resolution[0]), int(resolution[1]))
    betas = np.array([result.beta_f]) if nb == 1 else np.linspace(beta_range[0], beta_range[1], nb)
    taus = np.array([result.tau_f]) if nt == 1 else np.linspace(tau_range[0], tau_range[1], nt)
    out = np.empty((betas.size, taus.size))
    for j, t in enumerate(taus):
        for i, b in enumerate(betas):
            out[i, j] = problem.scores(t, b)["fidelity"]
    return RobustnessGrid(betas, taus, out)


# -- experimental presets -----------------------------------------------------

CQED_T_CAVITY = 0.130       # s, cavity damping time
CQED_T_ATOM = 0.030         # s, atomic lifetime
CQED_N_TH = 0.05            # thermal photons at 0.8 K
CQED_OMEGA0 = 2 * math.pi * 49e3  # rad/s, vacuum Rabi frequency


def cqed_preset() -> tuple:
    """Rydberg-atom CQED decoherence in units of ``g = Omega_0 / 2``.

    Returns
    -------
    (DecoherenceSpec, float, dict)
        Rates, the coupling ``g`` in rad/s, and metadata.
    """
    g = CQED_OMEGA0 / 2.0
    dec = DecoherenceSpec(kappa=(1.0 / CQED_T_CAVITY) / g, gamma=(1.0 / CQED_T_ATOM) / g, n_th=CQED_N_TH)
    meta = {
        "T_c_s": CQED_T_CAVITY,
        "T_a_s": CQED_T_ATOM,
        "n_th": CQED_N_TH,
        "Omega0_rad_s": CQED_OMEGA0,
        "g_rad_s": g,
        "resonance": "omega_c = omega_0",
        "fock_decay_rule": "rate(n) = kappa * n",
    }
    return dec, g, meta


def fock_decay_time(n: int, kappa: float) -> float:
    """Lifetime ``1/(kappa n)`` of ``|n>`` in the units of ``kappa``."""
    return math.inf if n == 0 or kappa == 0 else 1.0 / (kappa * n)


def rabi_periods(g_tau: float) -> float:
    """Convert ``g tau`` to single-photon Rabi periods ``2 pi / Omega_0 = pi / g``."""
    return g_tau / math.pi
