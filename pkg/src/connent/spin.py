"""XX spin-1/2 systems on weighted graphs.

``H = sum_{edges} t_ij (X_i X_j + Y_i Y_j)`` conserves the number of up
spins, so it is diagonalized one magnetization sector at a time. Basis
states are integers whose bit ``i`` is the spin on site ``i`` (1 = up).
Every unordered edge enters once; the hopping amplitude between
configurations that differ by swapping an antiparallel pair is ``2 t_ij``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .graph import CouplingGraph

MAX_SITES = 16
MAX_SITES_FULL_SPECTRUM = 14
# sectors larger than this are solved with Lanczos instead of dense eigh
DENSE_LIMIT = 600


@dataclass(frozen=True, eq=False)
class SectorBasis:
    n: int
    k: int
    states: np.ndarray

    @classmethod
    def build(cls, n: int, k: int) -> "SectorBasis":
        return cls(n, k, kernels.sector_states(n, k))

    @property
    def dim(self) -> int:
        return self.states.size


@dataclass(frozen=True, eq=False)
class SpinState:
    """Pure state over a list of basis configurations.

    ``k`` is the sector (number of up spins) or ``None`` for a vector on
    the full ``2**n`` space. ``multiplicity`` counts the low-lying levels
    found within tolerance of ``energy`` (1 = no degeneracy detected).
    """

    n: int
    states: np.ndarray
    amplitudes: np.ndarray
    energy: float = float("nan")
    k: int | None = None
    multiplicity: int = 1
    sector_minima: dict = field(default_factory=dict)

    @classmethod
    def from_vector(cls, vec, energy: float = float("nan")) -> "SpinState":
        vec = np.asarray(vec)
        n = int(round(np.log2(vec.size)))
        if 1 << n != vec.size:
            raise ValueError(f"vector length {vec.size} is not a power of two")
        vec = vec / np.linalg.norm(vec)
        return cls(n, np.arange(vec.size, dtype=np.int64), vec, energy)

    def to_vector(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=self.amplitudes.dtype)
        out[self.states] = self.amplitudes
        return out

    @property
    def degenerate(self) -> bool:
        return self.multiplicity > 1


def assemble_sector(g: CouplingGraph, sector: SectorBasis) -> sp.csr_matrix:
    """Real symmetric XX Hamiltonian restricted to ``sector``."""
    if g.n != sector.n:
        raise ValueError(f"graph has {g.n} sites but sector is for {sector.n}")
    ei, ej, ew = g.edge_arrays()
    rows, cols, vals = kernels.xx_sector_coo(sector.states, ei, ej, ew)
    dim = sector.dim
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def _lowest(h: sp.csr_matrix, count: int = 2) -> tuple[np.ndarray, np.ndarray]:
    dim = h.shape[0]
    count = min(count, dim)
    if dim <= DENSE_LIMIT:
        return scipy.linalg.eigh(h.toarray(), subset_by_index=[0, count - 1])
    # fixed start vector keeps ARPACK output reproducible
    v0 = np.random.default_rng(12345).standard_normal(dim)
    vals, vecs = spla.eigsh(h, k=count, which="SA", tol=0, v0=v0)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-10)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def degeneracy_tol(e0: float) -> float:
    return 1e-9 * max(1.0, abs(e0))


def ground_state(g: CouplingGraph) -> SpinState:
    """Lowest-energy eigenvector over all magnetization sectors.

    Sectors ``k`` and ``n - k`` are related by a global spin flip and have
    identical spectra, so only ``k <= n // 2`` is diagonalized. Ties are
    resolved toward the smallest ``k``; the sign is fixed so the first
    nonzero amplitude is positive.
    """
    n = g.n
    if not 1 <= n <= MAX_SITES:
        raise ValueError(f"spin ground state supports 1 <= n <= {MAX_SITES}, got {n}")
    minima = {}
    low_levels = []
    candidates = []
    for k in range(n // 2 + 1):
        basis = SectorBasis.build(n, k)
        vals, vecs = _lowest(assemble_sector(g, basis))
        mirror = 1 if 2 * k == n else 2
        low_levels.extend(list(vals) * mirror)
        minima[k] = float(vals[0])
        candidates.append((k, basis, float(vals[0]), vecs[:, 0]))
    e0 = min(minima.values())
    tol = degeneracy_tol(e0)
    k, basis, energy, vec = next(c for c in candidates if c[2] <= e0 + tol)
    multiplicity = int(sum(1 for e in low_levels if e <= e0 + tol))
    return SpinState(n, basis.states, _fix_sign(vec), energy, k, multiplicity, minima)


def spectrum(g: CouplingGraph) -> np.ndarray:
    """Every eigenvalue of ``H`` across all sectors, ascending (dense, small n only)."""
    n = g.n
    if not 1 <= n <= MAX_SITES_FULL_SPECTRUM:
        raise ValueError(f"full spectrum supports 1 <= n <= {MAX_SITES_FULL_SPECTRUM}, got {n}")
    parts = []
    for k in range(n // 2 + 1):
        h = assemble_sector(g, SectorBasis.build(n, k)).toarray()
        vals = np.linalg.eigvalsh(h)
        parts.append(vals)
        if 2 * k != n:
            parts.append(vals)
    return np.sort(np.concatenate(parts))


def degeneracy(g: CouplingGraph, tol: float | None = None) -> int:
    """Number of extra eigenvalues within ``tol`` of the ground energy."""
    vals = spectrum(g)
    if tol is None:
        tol = degeneracy_tol(vals[0])
    return int(np.count_nonzero(vals <= vals[0] + tol)) - 1


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """Density matrix on ``sites``; bit ``p`` of a row index is ``sites[p]``."""

    sites: tuple
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def reduced_density(state: SpinState, subset) -> ReducedDensity:
    sites = tuple(int(s) for s in subset)
    if not sites:
        raise ValueError("subset must be nonempty")
    if len(set(sites)) != len(sites):
        raise ValueError(f"subset has repeated sites: {sites}")
    if any(not 0 <= s < state.n for s in sites):
        raise ValueError(f"subset {sites} out of range for n={state.n}")
    rest = [s for s in range(state.n) if s not in sites]
    a = kernels.gather_bits(state.states, sites)
    b = kernels.gather_bits(state.states, rest)
    psi = np.zeros((1 << len(sites), 1 << len(rest)), dtype=state.amplitudes.dtype)
    psi[a, b] = state.amplitudes
    rho = psi @ psi.conj().T
    return ReducedDensity(sites, 0.5 * (rho + rho.conj().T))


def entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    m = rho.matrix if isinstance(rho, ReducedDensity) else np.asarray(rho)
    p = np.linalg.eigvalsh(m)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)) + 0.0)


def one_vs_rest_tangle(state: SpinState, site: int) -> float:
    """``4 det(rho_i)`` for a pure global state."""
    rho = reduced_density(state, [site]).matrix
    return float(np.real(4.0 * np.linalg.det(rho)))


_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))


def two_qubit_tangle(rho) -> float:
    """Squared Wootters concurrence of a two-qubit density matrix."""
    m = rho.matrix if isinstance(rho, ReducedDensity) else np.asarray(rho)
    if m.shape != (4, 4):
        raise ValueError(f"two-qubit density matrix must be 4x4, got {m.shape}")
    tilde = _YY @ m.conj() @ _YY
    w, u = np.linalg.eigh(m)
    root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    r = root @ tilde @ root
    mu = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (r + r.conj().T)), 0.0, None))[::-1]
    c = max(0.0, mu[0] - mu[1] - mu[2] - mu[3])
    return float(c * c)


def monogamy_budget_spin(state: SpinState, site: int = 0) -> tuple[float, float]:
    """(one-vs-rest tangle, sum of two-qubit tangles) for ``site``."""
    if state.n < 3:
        raise ValueError(f"monogamy budget needs n >= 3, got {state.n}")
    lhs = one_vs_rest_tangle(state, site)
    rhs = sum(two_qubit_tangle(reduced_density(state, [site, j]))
              for j in range(state.n) if j != site)
    return lhs, float(rhs)


def half_entropy(state: SpinState, mask) -> float:
    """Entropy of the sites where ``mask == +1``."""
    sites = np.flatnonzero(np.asarray(mask) == 1)
    return entropy(reduced_density(state, sites))


def sector_dimension(n: int, k: int) -> int:
    return comb(n, k)
