"""Coupling topologies and half/half partitions.

Every builder returns a :class:`CouplingGraph`, a symmetric weighted
adjacency matrix with zero diagonal. The same object feeds both the
harmonic (potential matrix) and the spin (XX Hamiltonian) models.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

Boundary = Literal["open", "closed"]
BondConvention = Literal["single", "double"]
PartitionScheme = Literal["contiguous", "parity"]


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True, eq=False)
class CouplingGraph:
    """Symmetric weighted adjacency matrix on ``n`` sites.

    An edge ``(i, j)`` is present iff ``weights[i, j] != 0``.
    """

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if self.n < 1:
            raise ValueError(f"site count must be positive, got {self.n}")
        if w.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("weights must have a zero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, CouplingGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(i, j, w)`` for every edge with ``i < j``, row-major."""
        iu, ju = np.nonzero(np.triu(self.weights, 1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            yield i, j, float(self.weights[i, j])

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        iu, ju = np.nonzero(np.triu(self.weights, 1))
        return iu.astype(np.int64), ju.astype(np.int64), self.weights[iu, ju].copy()

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def degrees(self) -> np.ndarray:
        return np.count_nonzero(self.weights, axis=1)

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        adj = self.weights != 0
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                stack.append(int(j))
        return bool(seen.all())

    def to_edgelist(self) -> str:
        lines = [f"n={self.n}"]
        lines += [f"{i} {j} {w!r}" for i, j, w in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "CouplingGraph":
        rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not rows or not rows[0].startswith("n="):
            raise ValueError("edge list must start with a 'n=<n>' header")
        n = int(rows[0][2:])
        w = np.zeros((n, n))
        for ln in rows[1:]:
            i, j, val = ln.split()
            i, j = int(i), int(j)
            if not 0 <= i < j < n:
                raise ValueError(f"bad edge line {ln!r}: need 0 <= i < j < n")
            w[i, j] = w[j, i] = float(val)
        return cls(n, w)

    def save(self, path) -> None:
        Path(path).write_text(self.to_edgelist())

    @classmethod
    def load(cls, path) -> "CouplingGraph":
        return cls.from_edgelist(Path(path).read_text())


def empty(n: int) -> CouplingGraph:
    return CouplingGraph(n, np.zeros((n, n)))


def complete(n: int, bond_convention: BondConvention = "single") -> CouplingGraph:
    """Complete graph; ``"double"`` puts weight 2 on every pair.

    The double-counted form equals ``build_chain(n, n, "closed", "double")``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    w = np.ones((n, n)) - np.eye(n)
    if bond_convention == "double":
        w *= 2.0
    elif bond_convention != "single":
        raise ValueError(f"unknown bond convention {bond_convention!r}")
    return CouplingGraph(n, w)


def build_chain(n: int, n_c: int, boundary: Boundary = "closed",
                bond_convention: BondConvention = "single") -> CouplingGraph:
    """1-D chain where each site couples to ``n_c`` neighbors on each side.

    With ``bond_convention="single"`` the result is a simple graph with
    unit weights (ring or index distance ``<= n_c``). With ``"double"``
    (closed chains only) every offset ``+-d``, ``d = 1..n_c``, adds one
    unit of coupling, so wrapped offsets that land on the same site
    accumulate; ``n_c`` may then go up to ``n``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if boundary not in ("open", "closed"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if bond_convention not in ("single", "double"):
        raise ValueError(f"unknown bond convention {bond_convention!r}")
    idx = np.arange(n)
    if boundary == "open":
        if bond_convention == "double":
            raise ValueError("double-counted bonds are only defined for closed chains")
        if not 1 <= n_c <= n - 1:
            raise ValueError(f"open chain needs 1 <= n_c <= {n - 1}, got {n_c}")
        dist = np.abs(idx[:, None] - idx[None, :])
        w = ((dist >= 1) & (dist <= n_c)).astype(float)
        return CouplingGraph(n, w)

    if bond_convention == "single":
        if not 1 <= n_c <= n // 2:
            raise ValueError(f"closed chain needs 1 <= n_c <= {n // 2}, got {n_c}")
        d = np.abs(idx[:, None] - idx[None, :])
        dist = np.minimum(d, n - d)
        w = ((dist >= 1) & (dist <= n_c)).astype(float)
        return CouplingGraph(n, w)

    if not 1 <= n_c <= n:
        raise ValueError(f"double-counted closed chain needs 1 <= n_c <= {n}, got {n_c}")
    w = np.zeros((n, n))
    for d in range(1, n_c + 1):
        for s in (d, -d):
            j = (idx + s) % n
            w[idx, j] += 1.0
    np.fill_diagonal(w, 0.0)
    return CouplingGraph(n, w)


def build_random(n: int, c_p: float, rng=None) -> CouplingGraph:
    """Erdos-Renyi graph: each unordered pair is an edge with probability ``c_p``."""
    if not 0.0 <= c_p <= 1.0:
        raise ValueError(f"c_p must lie in [0, 1], got {c_p}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = _as_rng(rng)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(iu.size) < c_p
    w = np.zeros((n, n))
    w[iu[hit], ju[hit]] = 1.0
    w[ju[hit], iu[hit]] = 1.0
    return CouplingGraph(n, w)


def build_bipartite_random(n: int, c_p: float, rng=None) -> CouplingGraph:
    """Random bipartite graph between even (A) and odd (B) sites."""
    if n < 2 or n % 2:
        raise ValueError(f"bipartite graphs need an even n >= 2, got {n}")
    if not 0.0 <= c_p <= 1.0:
        raise ValueError(f"c_p must lie in [0, 1], got {c_p}")
    rng = _as_rng(rng)
    a = np.arange(0, n, 2)
    b = np.arange(1, n, 2)
    ii, jj = np.meshgrid(a, b, indexing="ij")
    hit = rng.random(ii.shape) < c_p
    w = np.zeros((n, n))
    w[ii[hit], jj[hit]] = 1.0
    w[jj[hit], ii[hit]] = 1.0
    return CouplingGraph(n, w)


def bipartite_offsets(n: int, n_c: int) -> np.ndarray:
    """Ring offsets ``+-(2j-1)`` mod ``n``, ``j = 1..n_c``; validated to be distinct."""
    if n < 2 or n % 2:
        raise ValueError(f"bipartite graphs need an even n >= 2, got {n}")
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    odd = 2 * np.arange(1, n_c + 1) - 1
    offs = np.concatenate([odd % n, (-odd) % n])
    if np.unique(offs).size != offs.size:
        raise ValueError(f"offsets +-(2j-1) collide modulo n={n} for n_c={n_c}")
    return offs


def build_bipartite_regular(n: int, n_c: int) -> CouplingGraph:
    """Regular bipartite ring: site ``i`` couples to ``i +- (2j-1) mod n``."""
    offs = bipartite_offsets(n, n_c)
    idx = np.arange(n)
    w = np.zeros((n, n))
    for s in offs:
        w[idx, (idx + s) % n] = 1.0
    return CouplingGraph(n, w)


def assign_random_weights(g: CouplingGraph, rng=None, lo: float = 0.0,
                          hi: float = 1.0) -> CouplingGraph:
    """Replace each edge weight with an independent uniform draw from ``[lo, hi]``.

    Draws are consumed in row-major ``i < j`` edge order. ``lo == hi``
    sets every edge to that constant.
    """
    if lo > hi:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    iu, ju, _ = g.edge_arrays()
    if lo == hi:
        vals = np.full(iu.size, float(lo))
    else:
        vals = _as_rng(rng).uniform(lo, hi, size=iu.size)
    w = np.zeros((g.n, g.n))
    w[iu, ju] = vals
    w[ju, iu] = vals
    return CouplingGraph(g.n, w)


def half_partition(n: int, scheme: PartitionScheme = "contiguous") -> np.ndarray:
    """Return a +-1 mask: +1 marks group A, -1 group B."""
    if n < 2 or n % 2:
        raise ValueError(f"half/half partitions need an even n >= 2, got {n}")
    if scheme == "contiguous":
        return np.where(np.arange(n) < n // 2, 1, -1)
    if scheme == "parity":
        return np.where(np.arange(n) % 2 == 0, 1, -1)
    raise ValueError(f"unknown partition scheme {scheme!r}")
