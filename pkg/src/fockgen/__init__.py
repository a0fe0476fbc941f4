"""Deterministic Fock-state generation from a coherent field and two-level atoms.

The field interacts resonantly with one to three two-level systems for a
time ``tau`` and is then displaced by ``D(beta)``; the pair ``(tau, beta)``
is optimized so that the field approaches ``|n>``.
"""

__version__ = "0.1.0"

from . import kernels
from .dynamics import (DecoherenceSpec, InteractionHamiltonian, LindbladSolver,
                       build_h_int, closed_form_single_atom, energy_expectations,
                       evolve_lindblad, evolve_unitary)
from .errors import FockgenError
from .hilbert import (CoherentSpec, HilbertLayout, QuantumState, coherent_state,
                      displacement_exact, displacement_laguerre, fock_state, initial_state)
from .linalg import herm_eig, partial_trace
from .metrics import fidelity, photon_distribution, purity, trace_distance, wigner
from .protocol import (ProtocolResult, analytic_tau, beta_seed, cqed_preset, optimize,
                       post_select, robustness_sweep)

__all__ = [
    "__version__", "kernels",
    "DecoherenceSpec", "InteractionHamiltonian", "LindbladSolver", "build_h_int",
    "closed_form_single_atom", "energy_expectations", "evolve_lindblad", "evolve_unitary",
    "FockgenError",
    "CoherentSpec", "HilbertLayout", "QuantumState", "coherent_state", "displacement_exact",
    "displacement_laguerre", "fock_state", "initial_state",
    "herm_eig", "partial_trace",
    "fidelity", "photon_distribution", "purity", "trace_distance", "wigner",
    "ProtocolResult", "analytic_tau", "beta_seed", "cqed_preset", "optimize", "post_select",
    "robustness_sweep",
]
