"""Ground-state entanglement versus connectivity.

Harmonic lattices (Gaussian ground states, log-negativity) and XX
spin-1/2 systems (sector exact diagonalization, entropy, tangles) on
chains, random graphs and bipartite graphs.
"""
__version__ = "0.1.0"

from .graph import CouplingGraph  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["CouplingGraph", "BACKEND", "__version__"]
