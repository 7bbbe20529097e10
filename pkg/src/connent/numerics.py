"""Shared numerical kernels: symmetric eigenproblems, SPD roots, quadrature."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NotSPDError(ValueError):
    """Raised when a matrix expected to be positive definite is not."""


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature exceeds its refinement depth."""


@dataclass(frozen=True)
class SymmetricSpectrum:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return m


def sym_eig(m) -> SymmetricSpectrum:
    """Full spectrum of a real symmetric matrix, ascending."""
    m = _check_symmetric(m)
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    return SymmetricSpectrum(vals, vecs)


def spd_power_from_spectrum(spec: SymmetricSpectrum, p: float,
                            tol: float = 1e-12) -> np.ndarray:
    if spec.values.size and spec.values[0] <= tol:
        raise NotSPDError(f"smallest eigenvalue {spec.values[0]:.3e} <= {tol:g}")
    out = (spec.vectors * spec.values ** p) @ spec.vectors.T
    return 0.5 * (out + out.T)


def spd_power(m, p: float) -> np.ndarray:
    """``m**p`` for SPD ``m`` and ``p`` in ``{+1/2, -1/2}``."""
    if p not in (0.5, -0.5):
        raise ValueError(f"only exponents +-1/2 are supported, got {p}")
    return spd_power_from_spectrum(sym_eig(m), p)


# --- quadrature of the bipartite log-ratio integrand -----------------------

# 10-point Gauss-Legendre on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def bipartite_symbol(x, alpha: float, n_c: int):
    """``1 + 2 alpha n_c - 2 alpha sum_j cos((2j-1) x)``, the circulant eigenvalue curve."""
    x = np.asarray(x, dtype=float)
    odd = 2 * np.arange(1, n_c + 1) - 1
    c = np.cos(np.multiply.outer(x, odd)).sum(axis=-1)
    return 1.0 + 2.0 * alpha * n_c - 2.0 * alpha * c


def log_ratio(x, alpha: float, n_c: int):
    """``log2 g(x) - log2 g(pi - x)``; antisymmetric about ``pi/2``."""
    return (np.log2(bipartite_symbol(x, alpha, n_c))
            - np.log2(bipartite_symbol(np.pi - np.asarray(x, dtype=float), alpha, n_c)))


def _bisect_root(h, a: float, b: float, ha: float) -> float:
    for _ in range(200):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        hm = h(m)
        if hm == 0.0:
            return m
        if (hm > 0) == (ha > 0):
            a, ha = m, hm
        else:
            b = m
    return 0.5 * (a + b)


def _gl(h, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_GL_W, h(mid + half * _GL_X)))


def _adaptive(h, a: float, b: float, tol: float, depth: int, max_depth: int) -> float:
    whole = _gl(h, a, b)
    m = 0.5 * (a + b)
    left, right = _gl(h, a, m), _gl(h, m, b)
    if abs(left + right - whole) <= tol:
        return left + right
    if depth >= max_depth:
        raise QuadratureError(
            f"no convergence on [{a:.6g}, {b:.6g}] after {max_depth} subdivisions")
    return (_adaptive(h, a, m, 0.5 * tol, depth + 1, max_depth)
            + _adaptive(h, m, b, 0.5 * tol, depth + 1, max_depth))


def sign_changes(h, a: float, b: float, samples: int) -> list[float]:
    """Roots of ``h`` on ``(a, b)`` located on a uniform grid and refined by bisection."""
    xs = np.linspace(a, b, samples + 1)
    hs = h(xs)
    roots = []
    for k in range(samples):
        if hs[k] == 0.0 and 0 < k:
            roots.append(float(xs[k]))
        elif hs[k] * hs[k + 1] < 0:
            roots.append(_bisect_root(h, float(xs[k]), float(xs[k + 1]), float(hs[k])))
    return roots


@lru_cache(maxsize=4096)
def quad_abs_log(alpha: float, n_c: int, tol: float = 1e-8, max_depth: int = 40) -> float:
    """Integral over ``[0, pi]`` of ``|log2 g(x) - log2 g(pi - x)|``.

    The integrand is antisymmetric about ``pi/2``, so the integral is twice
    the one over ``[0, pi/2]``. Sign changes are bracketed on a grid and
    bisected; each smooth piece is then integrated with adaptive
    Gauss-Legendre.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")

    def h(x):
        return log_ratio(x, alpha, n_c)

    lo, hi = 0.0, 0.5 * np.pi
    cuts = [lo] + sign_changes(h, lo, hi, 64 * (2 * n_c)) + [hi]
    pieces = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    piece_tol = 0.5 * tol / len(pieces)

    def abs_h(x):
        return np.abs(h(x))

    # |h| keeps any kink the grid missed inside a piece; refinement resolves it
    total = sum(_adaptive(abs_h, a, b, piece_tol, 0, max_depth) for a, b in pieces)
    return 2.0 * total
