"""Dense linear algebra: min-norm least squares, ridge solves, and the
structured matrix builders used by the data models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .rng import RngStream

# 1-based row/column indexing for the cosine design matrix. With 0-based
# indexing the k=0 row would be constant; 1-based matches frequencies
# starting at 2*pi/M.
DCT_FIRST_INDEX = 1


@dataclass(frozen=True)
class LstsqSolution:
    """Minimum-norm least squares solution and the numerical rank used."""

    beta_hat: np.ndarray
    rank: int


def _as_system(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"design matrix must be 2-D, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ValueError(f"label vector shape {y.shape} does not match {X.shape[0]} rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise ValueError("non-finite entries in least squares input")
    return X, y


def min_norm_lstsq(X, y) -> LstsqSolution:
    """Minimum-Euclidean-norm minimizer of ||y - X b||^2.

    Underdetermined well-conditioned systems take a Gram-matrix fast path
    (Cholesky on X X^T); anything else, including factorization failures,
    falls back to the SVD pseudoinverse with cutoff rcond = eps * max(n, p).
    """
    X, y = _as_system(X, y)
    n, p = X.shape
    if n <= p:
        try:
            c = scipy.linalg.cho_factor(X @ X.T, check_finite=False)
            beta = X.T @ scipy.linalg.cho_solve(c, y, check_finite=False)
            return LstsqSolution(beta_hat=beta, rank=n)
        except scipy.linalg.LinAlgError:
            pass
    rcond = np.finfo(np.float64).eps * max(n, p)
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=rcond)
    return LstsqSolution(beta_hat=beta, rank=int(rank))


def ridge_solve(X, y, n_lambda: float) -> np.ndarray:
    """Ridge solution (X^T X + n_lambda I)^{-1} X^T y.

    For p > n the mathematically identical dual form
    X^T (X X^T + n_lambda I)^{-1} y is used. Requires n_lambda > 0;
    use min_norm_lstsq for the unregularized case.
    """
    if not n_lambda > 0:
        raise ValueError(f"n_lambda must be > 0, got {n_lambda}")
    X, y = _as_system(X, y)
    n, p = X.shape
    if p > n:
        G = X @ X.T
        G[np.diag_indices(n)] += n_lambda
        c = scipy.linalg.cho_factor(G, check_finite=False)
        return X.T @ scipy.linalg.cho_solve(c, y, check_finite=False)
    G = X.T @ X
    G[np.diag_indices(p)] += n_lambda
    c = scipy.linalg.cho_factor(G, check_finite=False)
    return scipy.linalg.cho_solve(c, X.T @ y, check_finite=False)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc; absolute error below 1e-15."""
    if not math.isfinite(x):
        raise ValueError(f"normal_cdf requires finite input, got {x}")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def dct_design_matrix(D: int) -> np.ndarray:
    """D x D cosine design: entry (k, l) = cos(2*pi*k*l/M)/sqrt(M+2), M = 2D-1.

    Indices are 1-based (see DCT_FIRST_INDEX). The product k*l is reduced
    mod M in exact integer arithmetic before the cosine, so entries stay
    accurate for large D.
    """
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    M = 2 * D - 1
    idx = np.arange(DCT_FIRST_INDEX, DCT_FIRST_INDEX + D, dtype=np.int64)
    kl = np.outer(idx, idx) % M
    return np.cos(2.0 * np.pi * kl / M) / np.sqrt(M + 2.0)


def sample_unit_sphere(stream: RngStream, dim: int) -> np.ndarray:
    """Uniform draw from the unit sphere in R^dim (normalized Gaussian)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    while True:
        v = stream.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm
