"""Pure-numpy versions of the sector kernels; used when the extension is absent."""
from itertools import combinations

import numpy as np


def sector_states(n, k):
    """All ``n``-bit integers with popcount ``k``, ascending."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    out = np.fromiter((sum(1 << p for p in c) for c in combinations(range(n), k)),
                      dtype=np.int64)
    out.sort()
    return out


def xx_sector_coo(states, ei, ej, ew):
    """COO triplets of the XX hopping matrix in a fixed-popcount basis.

    Each edge ``(i, j, t)`` links configurations that differ by swapping
    antiparallel bits ``i`` and ``j``, with amplitude ``2 t``.
    """
    states = np.asarray(states, dtype=np.int64)
    rows, cols, vals = [], [], []
    for i, j, t in zip(np.asarray(ei).tolist(), np.asarray(ej).tolist(),
                       np.asarray(ew).tolist()):
        flip = (1 << i) | (1 << j)
        bi = (states >> i) & 1
        bj = (states >> j) & 1
        src = np.flatnonzero(bi != bj)
        dst = np.searchsorted(states, states[src] ^ flip)
        rows.append(dst)
        cols.append(src)
        vals.append(np.full(src.size, 2.0 * t))
    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def gather_bits(states, sites):
    """Pack bits ``sites[0], sites[1], ...`` of each state into bits ``0, 1, ...``."""
    states = np.asarray(states, dtype=np.int64)
    out = np.zeros(states.shape, dtype=np.int64)
    for p, s in enumerate(np.asarray(sites).tolist()):
        out |= ((states >> s) & 1) << p
    return out
