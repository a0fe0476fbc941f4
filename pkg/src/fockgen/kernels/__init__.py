"""Hot numerical kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy implementations in ``_pykernels`` are selected. Setting the environment
variable ``FOCKGEN_PURE_PYTHON=1`` forces the fallback.

Kernels
-------
lindblad_rk4
    Fixed-step RK4 propagation of a density matrix under a Lindblad generator.
displacement_matrix
    Dense ``<m|D(beta)|n>`` via a normalized Laguerre-function recurrence.
wigner_parity
    Displaced-parity Wigner samples for a field density matrix.
"""

import os

from . import _pykernels as python

try:
    if os.environ.get("FOCKGEN_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

backend = compiled if compiled is not None else python
BACKEND = "compiled" if compiled is not None else "python"

lindblad_rk4 = backend.lindblad_rk4
displacement_matrix = backend.displacement_matrix
wigner_parity = backend.wigner_parity

__all__ = ["BACKEND", "compiled", "python", "lindblad_rk4", "displacement_matrix", "wigner_parity"]
