"""Harmonic lattices: potential matrices, Gaussian ground states, log-negativity.

Conventions
-----------
The ground state of ``H = X^T V X / 2 + P^T P / 2`` has position block
``gamma_x = V^{-1/2}`` and momentum block ``gamma_p = V^{1/2}`` (vacuum is
the identity). The log-negativity across a +-1 partition mask ``P`` is

    N_l = -sum_j log2 min(1, Lambda_j(gamma_x P gamma_p P))

applied unchanged to reduced (mixed) blocks. With this normalization the
circulant closed form for regular bipartite rings is exact.

Two-mode tangles on the right-hand side of the monogamy inequality use the
squared negativity of the reduced two-mode state. For mixed states this is
a lower bound on the convex-roof Gaussian tangle, so ``residual >= 0`` is
implied by the true inequality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .graph import CouplingGraph, bipartite_offsets

TANGLE_PROXY_NOTE = (
    "two-mode tangles are squared negativities of the reduced states "
    "(lower bound of the convex-roof Gaussian tangle)"
)


class NegativityError(ArithmeticError):
    """Raised when the partially transposed spectrum is unphysical."""


def build_potential(g: CouplingGraph, alpha: float) -> np.ndarray:
    """``V_ii = 1 + alpha * sum_j w_ij``, ``V_ij = -alpha * w_ij``.

    The uniform vector is always an eigenvector with eigenvalue 1.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    w = np.asarray(g.weights, dtype=float)
    return np.eye(g.n) + alpha * (np.diag(w.sum(axis=1)) - w)


@dataclass(frozen=True, eq=False)
class GaussianGround:
    gamma_x: np.ndarray
    gamma_p: np.ndarray

    @property
    def n(self) -> int:
        return self.gamma_x.shape[0]

    def purity_defect(self) -> float:
        return float(np.max(np.abs(self.gamma_x @ self.gamma_p - np.eye(self.n))))


def ground_state(v) -> GaussianGround:
    """Ground-state covariance blocks from one eigendecomposition of ``V``."""
    spec = numerics.sym_eig(v)
    gx = numerics.spd_power_from_spectrum(spec, -0.5)
    gp = numerics.spd_power_from_spectrum(spec, 0.5)
    return GaussianGround(gx, gp)


def two_mode_reduction(gs: GaussianGround, i: int, j: int) -> GaussianGround:
    """Principal 2x2 blocks on modes ``(i, j)``; generally a mixed state."""
    n = gs.n
    if i == j:
        raise ValueError("two_mode_reduction needs distinct modes")
    for m in (i, j):
        if not 0 <= m < n:
            raise IndexError(f"mode {m} out of range for {n} modes")
    idx = np.array([i, j])
    return GaussianGround(gs.gamma_x[np.ix_(idx, idx)], gs.gamma_p[np.ix_(idx, idx)])


def partial_transpose_spectrum(gs: GaussianGround, mask) -> np.ndarray:
    """Eigenvalues of ``gamma_x P gamma_p P``, ascending.

    Computed from the symmetric similar matrix ``S gamma_x S`` with
    ``S = P gamma_p^{1/2} P``, so the spectrum is real by construction.
    """
    mask = np.asarray(mask)
    if mask.shape != (gs.n,):
        raise ValueError(f"mask must have length {gs.n}, got shape {mask.shape}")
    if not np.all(np.isin(mask, (1, -1))):
        raise ValueError("mask entries must be +1 or -1")
    if np.all(mask == 1) or np.all(mask == -1):
        raise ValueError("mask must contain both +1 and -1 entries")
    root = numerics.spd_power(gs.gamma_p, 0.5)
    s = root * np.outer(mask, mask)
    m = s @ gs.gamma_x @ s
    lam = np.linalg.eigvalsh(0.5 * (m + m.T))
    if lam[0] <= 0:
        raise NegativityError(f"non-positive partially transposed eigenvalue {lam[0]:.3e}")
    return lam


def log_negativity(gs: GaussianGround, mask) -> float:
    lam = partial_transpose_spectrum(gs, mask)
    lam = np.where(np.abs(lam - 1.0) <= 1e-12, 1.0, lam)
    return float(-np.sum(np.log2(np.minimum(1.0, lam))))


def negativity_from_logneg(n_l: float) -> float:
    if n_l < 0:
        raise ValueError(f"log-negativity must be >= 0, got {n_l}")
    return (2.0 ** n_l - 1.0) / 2.0


def gaussian_tangle(gs: GaussianGround, mask) -> float:
    """Squared negativity across ``mask``."""
    return negativity_from_logneg(log_negativity(gs, mask)) ** 2


@dataclass(frozen=True)
class MonogamyBudget:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs


def monogamy_budget(gs: GaussianGround, mode: int = 0) -> MonogamyBudget:
    """Tangle of ``mode`` against the rest versus the sum of its two-mode tangles."""
    n = gs.n
    if n < 3:
        raise ValueError(f"monogamy budget needs n >= 3, got {n}")
    mask = -np.ones(n, dtype=int)
    mask[mode] = 1
    lhs = gaussian_tangle(gs, mask)
    rhs = 0.0
    for j in range(n):
        if j != mode:
            rhs += gaussian_tangle(two_mode_reduction(gs, mode, j), (1, -1))
    return MonogamyBudget(lhs, rhs)


# --- regular bipartite rings: circulant closed forms ------------------------

def circulant_spectrum(n: int, n_c: int, alpha: float) -> np.ndarray:
    """Eigenvalues ``lambda_k``, ``k = 0..n-1``, of the regular bipartite potential."""
    bipartite_offsets(n, n_c)
    x = 2.0 * np.pi * np.arange(n) / n
    return numerics.bipartite_symbol(x, alpha, n_c)


def logneg_bipartite_exact(n: int, n_c: int, alpha: float) -> float:
    """``1/2 sum_{k<n/2} |log2(lambda_k / lambda_{n/2-k})|`` for the even/odd split."""
    lam = circulant_spectrum(n, n_c, alpha)
    k = np.arange(n // 2)
    return float(0.5 * np.sum(np.abs(np.log2(lam[k] / lam[n // 2 - k]))))


def f_value(alpha: float, n_c: int, tol: float = 1e-8) -> float:
    return numerics.quad_abs_log(float(alpha), int(n_c), tol)


def logneg_bipartite_asymptotic(n: int, n_c: int, alpha: float, tol: float = 1e-8) -> float:
    """Large-``n`` limit ``n / (4 pi) * f(alpha, n_c)``."""
    return n / (4.0 * np.pi) * f_value(alpha, n_c, tol)
