"""Nearest-neighbour affinity graph and its unnormalized Laplacian.

The solver consumes the Laplacian as 2L so that the smoothness penalty
tr(B^T K (2L) K B) equals the full pairwise sum
sum_ij W_ij ||h(x_i) - h(x_j)||^2 (the usual identity carries a 1/2).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .exceptions import DegenerateInputError, InvalidInputError


def knn_affinity(points, n_neighbors: int) -> np.ndarray:
    """Symmetric nonnegative affinity matrix over Euclidean neighbourhoods.

    An edge (i, j) exists when i is among the n_neighbors nearest
    neighbours of j or vice versa; its weight is the cosine similarity of
    the two rows, clamped at zero. Distance ties break toward the lower row
    index; the diagonal is zero.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise InvalidInputError(f"points must be a 2-D matrix, got shape {pts.shape}")
    n = pts.shape[0]
    if not 1 <= n_neighbors < n:
        raise InvalidInputError(
            f"n_neighbors must lie in 1..{n - 1} for {n} points, got {n_neighbors}")
    norms = np.linalg.norm(pts, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateInputError(
            f"row {zero[0]} has zero norm; cosine similarity is undefined",
            row=int(zero[0]))
    dist = squareform(pdist(pts))
    np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")
    neighbours = order[:, :n_neighbors]
    adjacency = np.zeros((n, n), dtype=bool)
    adjacency[np.repeat(np.arange(n), n_neighbors), neighbours.ravel()] = True
    adjacency |= adjacency.T
    gram = pts @ pts.T
    gram = (gram + gram.T) / 2.0
    cosine = gram / np.outer(norms, norms)
    weights = np.where(adjacency, np.clip(cosine, 0.0, 1.0), 0.0)
    np.fill_diagonal(weights, 0.0)
    return weights


def laplacian(weights) -> np.ndarray:
    """Unnormalized graph Laplacian D - W; rows sum to zero up to roundoff."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidInputError(f"weights must be square, got shape {w.shape}")
    return np.diag(w.sum(axis=1)) - w
