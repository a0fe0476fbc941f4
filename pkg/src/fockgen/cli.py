"""Batch front end: config-driven scenarios and figure recipes.

Every run writes CSV tables and JSON documents into one output directory,
plus a ``manifest.json``. Apart from the manifest (which records wall-clock
times), identical inputs and package version give byte-identical files.

Exit status: 0 on success, 2 for invalid input (config, figure tag), 3 for
numerical failures. The error class name is printed on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy

from . import __version__, kernels
from .dynamics import (DecoherenceSpec, InteractionHamiltonian, energy_expectations,
                       evolve_lindblad, unitary_trajectory)
from .errors import ConfigError, FockgenError, NoImprovement, UnknownTag
from .hilbert import (BASIS_NOTE, CoherentSpec, HilbertLayout, QuantumState, default_field_dim,
                      displacement_exact, displacement_laguerre, displacement_matrix, initial_state)
from .linalg import partial_trace
from .metrics import WIGNER_CONVENTION, photon_distribution, purity, wigner
from .protocol import (DEFAULT_BRANCHES, METRICS, SUPPORTED_ATOMS, analytic_tau, beta_seed,
                       cqed_preset, fock_decay_time, optimize, rabi_periods, robustness_sweep)

SCENARIOS = ("evolve", "optimize", "sweep-n", "robustness", "decoherence", "wigner", "distribution")
FIGURE_TAGS = ("fig2a", "fig2d", "fig3a", "fig3b",
               "sm_fig1", "sm_fig2", "sm_fig3", "sm_fig4", "sm_fig5", "sm_fig6")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@dataclass
class ScenarioConfig:
    """Inputs of one scenario run.

    Attributes
    ----------
    scenario : str
        One of ``SCENARIOS``.
    n_bar : float
        Mean photon number of the initial coherent field (``alpha`` real).
    target_n : int or None
        Fock state sought; ``None`` means ``round(n_bar)``.
    targets : list of int or None
        Targets for ``sweep-n``; ``None`` means ``1 .. max(2 n_bar, n_bar + 15)``.
    n_atoms : int
        1, 2 or 3 atoms in their protocol state.
    branches : list of int
        Branch indices ``l`` searched by the optimizer.
    metric : str
        ``"trace"`` maximizes ``1 - delta``; ``"fidelity"`` maximizes ``<n|rho|n>``.
    post_select : str or None
        Atomic outcome (``"e"``, ``"gg"``, ...) to condition the field on.
    lossy : bool
        Include cavity and atomic decay. Rates default to the Rydberg CQED
        preset; ``kappa``, ``gamma`` (units of ``g``) and ``n_th`` override it.
    t_max, t_points : float, int
        Uniform time grid ``[0, t_max]`` in units of ``1/g`` for ``evolve``.
    field_dim : int or None
        Fock truncation; ``None`` picks one from ``n_bar`` and the target.
    dt : float
        Lindblad integrator step.
    beta_span, tau_span : float
        Half-widths of the ``robustness`` grid around the optimum.
    resolution : list of int
        ``[n_beta, n_tau]`` points of the ``robustness`` grid.
    wigner_extent, wigner_points : float, int
        Square phase-space window ``[-extent, extent]^2`` for ``wigner``.
    out : str
        Output directory (not part of the config hash).
    """

    scenario: str = "optimize"
    n_bar: float = 5.0
    target_n: int | None = None
    targets: list | None = None
    n_atoms: int = 1
    branches: list = field(default_factory=lambda: list(DEFAULT_BRANCHES))
    metric: str = "trace"
    post_select: str | None = None
    lossy: bool = False
    kappa: float | None = None
    gamma: float | None = None
    n_th: float | None = None
    t_max: float = 50.0
    t_points: int = 251
    field_dim: int | None = None
    dt: float = 1e-3
    beta_span: float = 0.1
    tau_span: float = 0.5
    resolution: list = field(default_factory=lambda: [41, 41])
    wigner_extent: float = 6.0
    wigner_points: int = 121
    out: str = "fockgen_out"

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            cfg = cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        return cfg.validated()

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def validated(self) -> "ScenarioConfig":
        def num(name, lo=None, integer=False, optional=False, strict=False):
            v = getattr(self, name)
            if v is None and optional:
                return
            ok_type = (int,) if integer else (int, float)
            if isinstance(v, bool) or not isinstance(v, ok_type) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite {'integer' if integer else 'number'}")
            if lo is not None and (v <= lo if strict else v < lo):
                raise ConfigError(f"{name} must be {'>' if strict else '>='} {lo}")
            setattr(self, name, int(v) if integer else float(v))

        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")
        num("n_bar", 0.0, strict=True)
        num("target_n", 1, integer=True, optional=True)
        num("n_atoms", 1, integer=True)
        if self.n_atoms not in SUPPORTED_ATOMS:
            raise ConfigError(f"n_atoms must be one of {SUPPORTED_ATOMS}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}")
        for name in ("targets", "branches"):
            v = getattr(self, name)
            if v is None and name == "targets":
                continue
            if not isinstance(v, list) or not v or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
                raise ConfigError(f"{name} must be a non-empty list of integers")
            if min(v) < (1 if name == "targets" else 0):
                raise ConfigError(f"{name} contains an out-of-range value")
        if self.post_select is not None:
            s = self.post_select
            if not isinstance(s, str) or len(s) != self.n_atoms or set(s) - {"e", "g"}:
                raise ConfigError(f"post_select must be an e/g string of length {self.n_atoms}")
        if not isinstance(self.lossy, bool):
            raise ConfigError("lossy must be true or false")
        for name in ("kappa", "gamma", "n_th"):
            num(name, 0.0, optional=True)
        num("t_max", 0.0, strict=True)
        num("t_points", 2, integer=True)
        num("field_dim", 2, integer=True, optional=True)
        num("dt", 0.0, strict=True)
        num("beta_span", 0.0)
        num("tau_span", 0.0)
        if (not isinstance(self.resolution, list) or len(self.resolution) != 2
                or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in self.resolution)):
            raise ConfigError("resolution must be [n_beta, n_tau] with positive integers")
        num("wigner_extent", 0.0, strict=True)
        num("wigner_points", 2, integer=True)
        if not isinstance(self.out, str) or not self.out:
            raise ConfigError("out must be a non-empty path string")
        return self

    @property
    def target(self) -> int:
        return self.target_n if self.target_n is not None else max(int(round(self.n_bar)), 1)

    @property
    def target_list(self) -> list:
        if self.targets is not None:
            return list(self.targets)
        hi = int(max(2 * self.n_bar, self.n_bar + 15))
        return list(range(1, hi + 1))

    def decoherence(self) -> DecoherenceSpec | None:
        if not self.lossy:
            return None
        return _override_preset(self.kappa, self.gamma, self.n_th)

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def _override_preset(kappa=None, gamma=None, n_th=None) -> DecoherenceSpec:
    preset, _, _ = cqed_preset()
    return DecoherenceSpec(kappa=preset.kappa if kappa is None else kappa,
                           gamma=preset.gamma if gamma is None else gamma,
                           n_th=preset.n_th if n_th is None else n_th)


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# -- output helpers -----------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


class Writer:
    """Owns one output directory and the header shared by its files."""

    def __init__(self, out: Path, digest: str):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.digest = digest
        self.files = []

    def header(self, wigner_note: bool = False, extra: Sequence[str] = ()) -> list:
        lines = [f"fockgen {__version__}", f"config_sha256 {self.digest}", BASIS_NOTE]
        if wigner_note:
            lines.append(WIGNER_CONVENTION)
        return lines + list(extra)

    def _path(self, name: str) -> Path:
        p = self.out / name
        self.files.append(name)
        return p

    def csv(self, name: str, columns: Sequence[str], rows, wigner_note=False, extra=()) -> Path:
        p = self._path(name)
        lines = ["# " + h for h in self.header(wigner_note, extra)]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        return p

    def json(self, name: str, payload: dict, wigner_note=False) -> Path:
        p = self._path(name)
        doc = {"header": self.header(wigner_note), **payload}
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")
        return p

    def manifest(self, inputs: dict, wall_time: float, timings: dict | None = None, **extra) -> Path:
        hashes = {}
        for name in self.files:
            with open(self.out / name, "rb") as fh:
                hashes[name] = hashlib.sha256(fh.read()).hexdigest()
        doc = {
            "fockgen": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "kernel_backend": kernels.BACKEND,
            "config_sha256": self.digest, "inputs": inputs, "outputs": hashes,
            "wall_time_s": wall_time, "timings_s": timings or {}, **extra,
        }
        p = self.out / "manifest.json"
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")
        return p


def read_table(path) -> dict:
    """Columns of a CSV written by ``Writer.csv`` as float arrays (text kept as str)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    names = lines[0].split(",")
    cols = list(zip(*(ln.split(",") for ln in lines[1:]))) or [()] * len(names)
    out = {}
    for name, col in zip(names, cols):
        try:
            out[name] = np.array([float(v) if v else math.nan for v in col])
        except ValueError:
            out[name] = list(col)
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    # order of results always follows ``items``
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class _Log:
    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def __call__(self, msg: str):
        if not self.quiet:
            print(msg, file=sys.stderr, flush=True)


# -- scenarios ----------------------------------------------------------------

def _optimize_cfg(cfg: ScenarioConfig, target: int | None = None, dec=None):
    return optimize(CoherentSpec.from_nbar(cfg.n_bar), cfg.n_atoms, target or cfg.target,
                    dec=dec, branches=cfg.branches, metric=cfg.metric,
                    post_select=cfg.post_select, field_dim=cfg.field_dim, dt=cfg.dt)


def _scenario_evolve(cfg, w, threads, log):
    spec = CoherentSpec.from_nbar(cfg.n_bar)
    fd = cfg.field_dim or max(default_field_dim(cfg.n_bar), cfg.target + 12)
    layout = HilbertLayout(fd, cfg.n_atoms)
    psi0 = initial_state(spec, cfg.n_atoms, fd)
    h = InteractionHamiltonian(layout)
    times = np.linspace(0.0, cfg.t_max, cfg.t_points)
    dec = cfg.decoherence()
    if dec is None:
        states = [QuantumState(layout, v) for v in unitary_trajectory(psi0, h, times)]
    else:
        states = evolve_lindblad(psi0, h, dec, times, cfg.dt)
    n = cfg.target
    rows = []
    for t, s in zip(times, states):
        rf = partial_trace(s, layout, "field")
        e = energy_expectations(s)
        p = np.real(np.diag(rf))
        rows.append((t, float(np.arange(fd) @ p), p[n] if n < fd else 0.0, purity(rf),
                     e.field, e.atomic, e.interaction, e.total))
    log(f"evolve: {len(times)} times, field_dim={fd}")
    w.csv("evolve.csv", ["g_t", "mean_n", "p_target", "field_purity", "e_field", "e_atoms",
                         "e_interaction", "e_total"], rows)
    return {"field_dim": fd}


def _scenario_optimize(cfg, w, threads, log):
    r = _optimize_cfg(cfg, dec=cfg.decoherence())
    log(f"optimize: n={r.target_n} l={r.branch_l} g_tau={r.tau_f:.6f} beta={r.beta_f:.6f} F={r.fidelity:.6f}")
    w.json("result.json", {"result": r.to_dict(include_state=True)})
    w.csv("branches.csv", ["branch_l", "seed_g_tau", "seed_beta", "g_tau_f", "beta_f",
                           "one_minus_delta", "fidelity"],
          [(b.l, b.seed_tau, b.seed_beta, b.g_tau, b.beta, b.scores["one_minus_delta"],
            b.scores["fidelity"]) for b in r.branches])
    return {"field_dim": r.field_dim}


_SWEEP_COLUMNS = ["n", "branch_l", "g_tau_f", "beta_f", "one_minus_delta", "fidelity", "purity"]


def _sweep_row(r, n):
    if r is None:
        return (n, None, math.nan, math.nan, math.nan, math.nan, math.nan)
    return (n, r.branch_l, r.tau_f, r.beta_f, r.one_minus_delta, r.fidelity, r.purity)


def _scenario_sweep(cfg, w, threads, log):
    dec = cfg.decoherence()

    def one(n):
        try:
            r = _optimize_cfg(cfg, n, dec)
        except NoImprovement:
            r = None
        log(f"sweep-n: n={n} done")
        return _sweep_row(r, n)

    rows = _pmap(one, cfg.target_list, threads)
    w.csv("sweep_n.csv", _SWEEP_COLUMNS, rows)
    return {}


def _scenario_robustness(cfg, w, threads, log):
    r = _optimize_cfg(cfg, dec=cfg.decoherence())
    grid = robustness_sweep(r, (r.beta_f - cfg.beta_span, r.beta_f + cfg.beta_span),
                            (r.tau_f - cfg.tau_span, r.tau_f + cfg.tau_span), cfg.resolution)
    rows = [(b, t, grid.fidelity[i, j]) for i, b in enumerate(grid.betas) for j, t in enumerate(grid.taus)]
    log(f"robustness: {grid.fidelity.size} grid points")
    w.json("result.json", {"result": r.to_dict()})
    w.csv("robustness.csv", ["beta", "g_tau", "fidelity"], rows)
    return {"field_dim": r.field_dim}


def _scenario_decoherence(cfg, w, threads, log):
    dec = _override_preset(cfg.kappa, cfg.gamma, cfg.n_th)
    ideal = _optimize_cfg(cfg)
    log(f"decoherence: lossless F={ideal.fidelity:.6f}")
    spec = CoherentSpec.from_nbar(cfg.n_bar)
    lossy = optimize(spec, cfg.n_atoms, cfg.target, dec=dec, branches=cfg.branches, metric=cfg.metric,
                     post_select=cfg.post_select, field_dim=ideal.field_dim, dt=cfg.dt, start=ideal)
    log(f"decoherence: lossy F={lossy.fidelity:.6f}")
    w.json("result.json", {"decoherence": dec.to_dict(), "lossless": ideal.to_dict(),
                           "lossy": lossy.to_dict()})
    w.csv("decoherence.csv", ["case", "branch_l", "g_tau_f", "beta_f", "one_minus_delta", "fidelity", "purity"],
          [(name, r.branch_l, r.tau_f, r.beta_f, r.one_minus_delta, r.fidelity, r.purity)
           for name, r in (("lossless", ideal), ("lossy", lossy))])
    return {"field_dim": ideal.field_dim}


def _wigner_rows(grid):
    rows = [("x\\p", *grid.p_axis)]
    rows.extend((x, *grid.values[i]) for i, x in enumerate(grid.x_axis))
    return rows


def _scenario_wigner(cfg, w, threads, log):
    r = _optimize_cfg(cfg, dec=cfg.decoherence())
    axis = np.linspace(-cfg.wigner_extent, cfg.wigner_extent, cfg.wigner_points)
    grid = wigner(r.field_state, axis, axis, check=False)
    rows = _wigner_rows(grid)
    log(f"wigner: {axis.size}x{axis.size} grid, min W={grid.values.min():.6f}")
    w.json("result.json", {"result": r.to_dict(), "wigner_min": float(grid.values.min()),
                           "wigner_integral": grid.integral()}, wigner_note=True)
    # first row carries the p axis, first column the x axis
    w.csv("wigner.csv", [_fmt(v) for v in rows[0]], rows[1:], wigner_note=True)
    return {"field_dim": r.field_dim}


def _distribution_rows(r):
    problem = r.problem
    before = photon_distribution(problem.field_state(r.tau_f, 0.0))
    after = photon_distribution(r.field_state)
    d = displacement_matrix(-r.beta_f, problem.field_dim)
    ideal = np.abs(d[:, r.target_n]) ** 2
    return [(k, before[k], after[k], ideal[k]) for k in range(problem.field_dim)]


def _scenario_distribution(cfg, w, threads, log):
    r = _optimize_cfg(cfg, dec=cfg.decoherence())
    w.json("result.json", {"result": r.to_dict()})
    w.csv("distribution.csv", ["n", "p_before", "p_after", "p_ideal_displaced"], _distribution_rows(r))
    log("distribution: done")
    return {"field_dim": r.field_dim}


_SCENARIO_FUNCS = {
    "evolve": _scenario_evolve, "optimize": _scenario_optimize, "sweep-n": _scenario_sweep,
    "robustness": _scenario_robustness, "decoherence": _scenario_decoherence,
    "wigner": _scenario_wigner, "distribution": _scenario_distribution,
}


def run_scenario(config: ScenarioConfig, out=None, threads: int = 1, quiet: bool = True) -> Path:
    """Run one scenario and return the output directory."""
    config = config.validated()
    out = Path(out or config.out)
    w = Writer(out, config_hash(config.canonical()))
    t0 = time.perf_counter()
    info = _SCENARIO_FUNCS[config.scenario](config, w, threads, _Log(quiet))
    w.manifest({"config": config.canonical()}, time.perf_counter() - t0, truncation=info)
    return out


# -- figure recipes -----------------------------------------------------------

def _opt_row(task):
    nbar, n_atoms, n, metric, dec, branches = task
    spec = CoherentSpec.from_nbar(nbar)
    try:
        return optimize(spec, n_atoms, n, dec=dec, branches=branches, metric=metric)
    except NoImprovement:
        return None


def _opt_many(tasks, threads, log, label):
    def run(task):
        t0 = time.perf_counter()
        r = _opt_row(task)
        log(f"{label}: n_bar={task[0]:g} N={task[1]} n={task[2]} done")
        return r, time.perf_counter() - t0
    out = _pmap(run, tasks, threads)
    return [o[0] for o in out], [o[1] for o in out]


# desk-scale caps and the extended ranges enabled by --allow-long
FIGURE_LIMITS = {
    "fig2a": {"desk": (5, 10, 20), "long": (5, 10, 20, 50)},
    "fig2d": {"desk": 25, "long": 25},
    "fig3a": {"desk": 20, "long": 60},
    "fig3b": {"desk": 20, "long": 60, "lossy_desk": {1: (2, 5, 10), 2: (5,)}},
    "sm_fig1": {"desk": 15, "long": 40},
    "sm_fig2": {"desk": 20, "long": 60},
    "sm_fig3": {"desk": 20, "long": 60},
    "sm_fig6": {"desk": ((1, 5), (2, 10)), "long": ((1, 5), (1, 50), (2, 10))},
}
LONG_ESTIMATES = {"fig2a": "15 min", "fig3a": "20 min", "fig3b": "several hours", "sm_fig1": "30 min",
                  "sm_fig2": "15 min", "sm_fig3": "15 min", "sm_fig6": "10 min"}
FIGURE_METRIC = {"fig2a": "trace", "fig2d": "trace"}


def _branches_for(n: int) -> tuple:
    # larger n pushes the best branch to larger l
    return tuple(range(0, 4 if n <= 30 else 9))


def _fig_sweep(tag, w, threads, log, n_atoms_list, nmax, name, columns, row_fn, metric):
    tasks = [(float(n), N, n, metric, None, _branches_for(n)) for N in n_atoms_list for n in range(1, nmax + 1)]
    res, times = _opt_many(tasks, threads, log, tag)
    rows = [row_fn(t, r) for t, r in zip(tasks, res)]
    w.csv(name, columns, rows)
    return dict(zip([f"N{t[1]}_n{t[2]}" for t in tasks], times))


def _fig2a(w, threads, log, long):
    nbars = FIGURE_LIMITS["fig2a"]["long" if long else "desk"]
    tasks = [(float(nb), 1, n, "trace", None, _branches_for(n))
             for nb in nbars for n in range(1, int(max(2 * nb, nb + 15)) + 1)]
    res, times = _opt_many(tasks, threads, log, "fig2a")
    rows = [(t[0], t[2], *(_sweep_row(r, t[2])[4:6])) for t, r in zip(tasks, res)]
    w.csv("fig2a.csv", ["n_bar", "n", "one_minus_delta", "fidelity"], rows)
    return dict(zip([f"nbar{t[0]:g}_n{t[2]}" for t in tasks], times))


def _fig2d(w, threads, log, long):
    nmax = FIGURE_LIMITS["fig2d"]["desk"]
    tasks = [(10.0, N, n, "trace", None, DEFAULT_BRANCHES) for N in (1, 2, 3) for n in range(1, nmax + 1)]
    res, times = _opt_many(tasks, threads, log, "fig2d")
    rows = [(t[1], t[2], *(_sweep_row(r, t[2])[4:6])) for t, r in zip(tasks, res)]
    w.csv("fig2d.csv", ["n_atoms", "n", "one_minus_delta", "fidelity"], rows)
    return dict(zip([f"N{t[1]}_n{t[2]}" for t in tasks], times))


def _branch_table(w, name, n_atoms_list, nmax, lmax=3):
    rows = [(N, l, n, analytic_tau(n, l, N), rabi_periods(analytic_tau(n, l, N)))
            for N in n_atoms_list for l in range(lmax + 1) for n in range(1, nmax + 1)]
    w.csv(name, ["n_atoms", "l", "n", "g_tau", "rabi_periods"], rows)


def _time_row(t, r):
    if r is None:
        return (t[1], t[2], None, math.nan, math.nan)
    return (t[1], t[2], r.branch_l, r.tau_f, rabi_periods(r.tau_f))


def _fig3a(w, threads, log, long):
    nmax = FIGURE_LIMITS["fig3a"]["long" if long else "desk"]
    times = _fig_sweep("fig3a", w, threads, log, (1, 2), nmax, "fig3a.csv",
                       ["n_atoms", "n", "branch_l", "g_tau_f", "rabi_periods"], _time_row, "fidelity")
    _branch_table(w, "fig3a_branches.csv", (1, 2), nmax)
    dec, _, _ = cqed_preset()
    w.csv("fig3a_decay.csv", ["n", "decay_g_tau", "decay_rabi_periods"],
          [(n, fock_decay_time(n, dec.kappa), rabi_periods(fock_decay_time(n, dec.kappa)))
           for n in range(1, nmax + 1)])
    return times


def _fig3b(w, threads, log, long):
    lim = FIGURE_LIMITS["fig3b"]
    nmax = lim["long" if long else "desk"]
    dec, _, _ = cqed_preset()
    tasks = [(float(n), N, n, "fidelity", None, _branches_for(n)) for N in (1, 2) for n in range(1, nmax + 1)]
    res, times = _opt_many(tasks, threads, log, "fig3b")
    lossless = {(t[1], t[2]): r for t, r in zip(tasks, res)}
    lossy_sel = {N: (range(1, nmax + 1) if long else lim["lossy_desk"][N]) for N in (1, 2)}
    lossy_tasks = [(N, n) for N in (1, 2) for n in lossy_sel[N] if lossless.get((N, n)) is not None]

    def run(key):
        N, n = key
        t0 = time.perf_counter()
        start = lossless[key]
        r = optimize(CoherentSpec.from_nbar(n), N, n, dec=dec, branches=_branches_for(n),
                     metric="fidelity", field_dim=start.field_dim, start=start)
        log(f"fig3b: lossy N={N} n={n} done")
        return r, time.perf_counter() - t0

    lossy = dict(zip(lossy_tasks, _pmap(run, lossy_tasks, threads)))
    rows = []
    for t, r in zip(tasks, res):
        rows.append((t[1], t[2], "lossless", math.nan if r is None else r.fidelity))
        if (t[1], t[2]) in lossy:
            rows.append((t[1], t[2], "cqed", lossy[(t[1], t[2])][0].fidelity))
    w.csv("fig3b.csv", ["n_atoms", "n", "case", "fidelity"], rows)
    timings = dict(zip([f"N{t[1]}_n{t[2]}" for t in tasks], times))
    timings.update({f"lossy_N{k[0]}_n{k[1]}": v[1] for k, v in lossy.items()})
    return timings


def _sm_fig1(w, threads, log, long):
    nmax = FIGURE_LIMITS["sm_fig1"]["long" if long else "desk"]
    times = _fig_sweep("sm_fig1", w, threads, log, (1, 2, 3), nmax, "sm_fig1.csv",
                       ["n_atoms", "n", "branch_l", "g_tau_f", "rabi_periods"], _time_row, "fidelity")
    _branch_table(w, "sm_fig1_branches.csv", (1, 2, 3), nmax)
    return times


def _sm_fig2(w, threads, log, long):
    nmax = FIGURE_LIMITS["sm_fig2"]["long" if long else "desk"]

    def row(t, r):
        if r is None:
            return (t[1], t[2], None, math.nan, math.nan)
        return (t[1], t[2], r.branch_l, r.beta_f, beta_seed(t[2], r.branch_l))

    return _fig_sweep("sm_fig2", w, threads, log, (1, 2), nmax, "sm_fig2.csv",
                      ["n_atoms", "n", "branch_l", "beta_f", "beta_fit"], row, "fidelity")


def _sm_fig3(w, threads, log, long):
    nmax = FIGURE_LIMITS["sm_fig3"]["long" if long else "desk"]

    def row(t, r):
        return (t[1], t[2], math.nan if r is None else r.purity)

    return _fig_sweep("sm_fig3", w, threads, log, (1, 2), nmax, "sm_fig3.csv",
                      ["n_atoms", "n", "purity"], row, "fidelity")


def _sm_fig4(w, threads, log, long):
    n = 5
    res = optimize(CoherentSpec.from_nbar(n), 1, n, metric="fidelity")
    problem = res.problem
    # diagonal of the field density matrix before displacement, versus g t
    times = np.linspace(0.0, 60.0, 301)
    rows = []
    for t in times:
        p = photon_distribution(problem.field_state(t, 0.0))
        rows.extend((t, k, p[k]) for k in range(problem.field_dim))
    w.csv("sm_fig4_evolution.csv", ["g_t", "n", "p"], rows)
    _branch_table(w, "sm_fig4_branches.csv", (1,), n)
    rows = []
    for b in res.branches:
        if b.l not in (1, 2):
            continue
        before = photon_distribution(problem.field_state(b.g_tau, 0.0))
        after = photon_distribution(problem.field_state(b.g_tau, b.beta))
        ideal = np.abs(displacement_matrix(-b.beta, problem.field_dim)[:, n]) ** 2
        rows.extend((b.l, b.g_tau, b.beta, k, before[k], ideal[k], after[k]) for k in range(problem.field_dim))
    w.csv("sm_fig4_branches_l12.csv", ["l", "g_tau_f", "beta_f", "n", "p_before", "p_ideal_displaced",
                                       "p_after"], rows)
    log("sm_fig4: done")
    return {}


def _sm_fig5(w, threads, log, long):
    n = 5
    res = optimize(CoherentSpec.from_nbar(n), 1, n, metric="fidelity")
    p = res.problem
    layout = p.layout
    h = InteractionHamiltonian(layout)
    times = np.linspace(0.0, 40.0, 401)
    rows = []
    for t, v in zip(times, unitary_trajectory(p.psi0, h, times)):
        e = energy_expectations(QuantumState(layout, v))
        rows.append((t, e.field, e.atomic, e.interaction, e.field + e.atomic))
    extra = [f"tau_f {res.tau_f!r}", f"beta_f {res.beta_f!r}", f"target_energy {float(n)!r}"]
    w.csv("sm_fig5.csv", ["g_t", "e_field", "e_atom", "e_interaction", "e_total"], rows, extra=extra)
    log("sm_fig5: done")
    return {}


def _sm_fig6(w, threads, log, long):
    cases = FIGURE_LIMITS["sm_fig6"]["long" if long else "desk"]

    def run(case):
        N, n = case
        t0 = time.perf_counter()
        r = optimize(CoherentSpec.from_nbar(n), N, n, metric="fidelity", branches=_branches_for(n))
        g = robustness_sweep(r, (r.beta_f - 0.3, r.beta_f + 0.3), (r.tau_f - 1.0, r.tau_f + 1.0), (41, 41))
        log(f"sm_fig6: N={N} n={n} done")
        return r, g, time.perf_counter() - t0

    out = _pmap(run, list(cases), threads)
    rows = []
    for (N, n), (r, g, _) in zip(cases, out):
        rows.extend((N, n, b, t, g.fidelity[i, j]) for i, b in enumerate(g.betas) for j, t in enumerate(g.taus))
    w.csv("sm_fig6.csv", ["n_atoms", "n", "beta", "g_tau", "fidelity"], rows)
    return {f"N{c[0]}_n{c[1]}": o[2] for c, o in zip(cases, out)}


_FIGURES = {"fig2a": _fig2a, "fig2d": _fig2d, "fig3a": _fig3a, "fig3b": _fig3b,
            "sm_fig1": _sm_fig1, "sm_fig2": _sm_fig2, "sm_fig3": _sm_fig3,
            "sm_fig4": _sm_fig4, "sm_fig5": _sm_fig5, "sm_fig6": _sm_fig6}


def reproduce_figure(tag: str, out, threads: int = 1, allow_long: bool = False, quiet: bool = True) -> Path:
    """Write the tables behind one figure into ``out``.

    Desk-scale caps are listed in ``FIGURE_LIMITS``; ``allow_long`` enables
    the extended ranges.

    Raises
    ------
    UnknownTag
        If ``tag`` is not in ``FIGURE_TAGS``.
    """
    if tag not in _FIGURES:
        raise UnknownTag(f"unknown figure tag {tag!r}; expected one of {FIGURE_TAGS}")
    log = _Log(quiet)
    long = bool(allow_long) and tag in LONG_ESTIMATES
    if tag in LONG_ESTIMATES:
        est = LONG_ESTIMATES[tag]
        log(f"{tag}: extended variant, estimated runtime {est}" if long
            else f"{tag}: desk-scale variant (extended variant needs --allow-long, est. {est})")
    params = {"tag": tag, "variant": "long" if long else "desk",
              "limits": FIGURE_LIMITS.get(tag, {}), "metric": FIGURE_METRIC.get(tag, "fidelity")}
    w = Writer(Path(out), config_hash(params))
    t0 = time.perf_counter()
    timings = _FIGURES[tag](w, threads, log, long)
    w.manifest(params, time.perf_counter() - t0, timings,
               truncation="default_field_dim(n_bar) or target + 12, whichever is larger")
    return Path(out)


# -- entry point --------------------------------------------------------------

def seed_check(betas=(0.1, 0.477, 0.649, 1.0), dim: int = 30, tol: float = 1e-9) -> float:
    """Largest Laguerre-vs-expm discrepancy of ``<m|D(beta)|n>`` over the test set."""
    worst = 0.0
    for b in betas:
        ref = displacement_exact(b, dim)
        lag = np.array([[displacement_laguerre(b, m, n) for n in range(dim)] for m in range(dim)])
        worst = max(worst, float(np.max(np.abs(ref - lag))))
    if worst >= tol:
        raise FockgenError(f"displacement seed check failed: max deviation {worst:.3e}")
    return worst


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fockgen", description="Fock-state generation scenarios and figure tables")
    ap.add_argument("--config", type=Path, help="JSON scenario config")
    ap.add_argument("--scenario", choices=SCENARIOS, help="override the config scenario")
    ap.add_argument("--figure", metavar="TAG", help=f"reproduce a figure: {', '.join(FIGURE_TAGS)}")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--threads", type=int, default=1, help="worker threads (0 = all cores)")
    ap.add_argument("--seed-check", action="store_true", help="verify displacement matrix elements first")
    ap.add_argument("--allow-long", action="store_true", help="enable extended figure variants")
    ap.add_argument("--quiet", action="store_true", help="suppress progress lines")
    ap.add_argument("--version", action="version", version=f"fockgen {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = (os.cpu_count() or 1) if args.threads == 0 else max(args.threads, 1)
    log = _Log(args.quiet)
    try:
        if args.threads < 0:
            raise ConfigError("--threads must be >= 0")
        if args.seed_check:
            log(f"seed check: max deviation {seed_check():.2e}")
        if args.figure is not None:
            if args.config is not None or args.scenario is not None:
                raise ConfigError("--figure cannot be combined with --config/--scenario")
            out = reproduce_figure(args.figure, args.out or Path(args.figure), threads,
                                   args.allow_long, args.quiet)
        else:
            cfg = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
            if args.scenario:
                cfg.scenario = args.scenario
            out = run_scenario(cfg, args.out, threads, args.quiet)
    except (ConfigError, UnknownTag) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FockgenError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    log(f"outputs written to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
