# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sector kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef i64[:, ::1] _binom_table(int n):
    cdef i64[:, ::1] c = np.zeros((n + 1, n + 1), dtype=np.int64)
    cdef int a, b
    for a in range(n + 1):
        c[a, 0] = 1
        for b in range(1, a + 1):
            c[a, b] = c[a - 1, b - 1] + c[a - 1, b]
    return c


def sector_states(int n, int k):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    cdef i64[:, ::1] c = _binom_table(n)
    cdef i64 dim = c[n, k]
    out = np.empty(dim, dtype=np.int64)
    cdef i64[::1] o = out
    cdef i64 s, t, u, idx
    if k == 0:
        o[0] = 0
        return out
    s = ((<i64>1) << k) - 1
    for idx in range(dim):
        o[idx] = s
        # Gosper's hack: next integer with the same popcount
        u = s & -s
        t = s + u
        s = t | (((t ^ s) >> 2) // u)
    return out


def xx_sector_coo(states, ei, ej, ew):
    cdef i64[::1] st = np.ascontiguousarray(states, dtype=np.int64)
    cdef i64[::1] ii = np.ascontiguousarray(ei, dtype=np.int64)
    cdef i64[::1] jj = np.ascontiguousarray(ej, dtype=np.int64)
    cdef double[::1] tt = np.ascontiguousarray(ew, dtype=np.float64)
    cdef Py_ssize_t dim = st.shape[0], ne = ii.shape[0]
    cdef Py_ssize_t a, e, nnz = 0
    cdef i64 s, flip, top = 0
    for a in range(dim):
        if st[a] > top:
            top = st[a]
    for e in range(ne):
        if ((<i64>1) << ii[e]) > top:
            top = (<i64>1) << ii[e]
        if ((<i64>1) << jj[e]) > top:
            top = (<i64>1) << jj[e]
    # dense state -> index table; sizes stay at 2**n <= 65536 for n <= 16
    cdef int nbits = 1
    while ((<i64>1) << nbits) <= top:
        nbits += 1
    lookup = np.full((<i64>1) << nbits, -1, dtype=np.int64)
    cdef i64[::1] lk = lookup
    for a in range(dim):
        lk[st[a]] = a
    # upper bound: every state hops along every edge
    rows = np.empty(dim * ne, dtype=np.int64)
    cols = np.empty(dim * ne, dtype=np.int64)
    vals = np.empty(dim * ne, dtype=np.float64)
    cdef i64[::1] r = rows
    cdef i64[::1] cc = cols
    cdef double[::1] v = vals
    cdef double amp
    with nogil:
        for e in range(ne):
            flip = ((<i64>1) << ii[e]) | ((<i64>1) << jj[e])
            amp = 2.0 * tt[e]
            for a in range(dim):
                s = st[a]
                if ((s >> ii[e]) ^ (s >> jj[e])) & 1:
                    r[nnz] = lk[s ^ flip]
                    cc[nnz] = a
                    v[nnz] = amp
                    nnz += 1
    return rows[:nnz], cols[:nnz], vals[:nnz]


def gather_bits(states, sites):
    cdef i64[::1] st = np.ascontiguousarray(states, dtype=np.int64).ravel()
    cdef i64[::1] si = np.ascontiguousarray(sites, dtype=np.int64)
    out = np.zeros(st.shape[0], dtype=np.int64)
    cdef i64[::1] o = out
    cdef Py_ssize_t a, p
    cdef i64 acc
    with nogil:
        for a in range(st.shape[0]):
            acc = 0
            for p in range(si.shape[0]):
                acc |= ((st[a] >> si[p]) & 1) << p
            o[a] = acc
    return out
