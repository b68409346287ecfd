"""Gaussian kernel with a median-heuristic bandwidth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .exceptions import DegenerateInputError, InvalidInputError


@dataclass(frozen=True)
class KernelConfig:
    """Bandwidth of the Gaussian kernel, in feature-distance units."""

    bandwidth: float

    def __post_init__(self):
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise InvalidInputError(
                f"bandwidth must be a positive finite real, got {self.bandwidth}")


def median_bandwidth(points) -> KernelConfig:
    """Median Euclidean distance over all distinct pairs i < j.

    Self-pairs are excluded; for an even pair count the two middle values
    are averaged. Coincident points leave no usable scale and raise
    DegenerateInputError.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidInputError("median_bandwidth needs at least two points")
    if not np.isfinite(pts).all():
        raise InvalidInputError("points contain non-finite values")
    med = float(np.median(pdist(pts)))
    if med == 0.0:
        raise DegenerateInputError("median pairwise distance is zero (all points coincide)")
    return KernelConfig(bandwidth=med)


def kernel_matrix(points, cfg: KernelConfig) -> np.ndarray:
    """Dense Gaussian kernel matrix exp(-||xi - xj||^2 / (2 r^2)).

    Exactly symmetric with a unit diagonal; rows keep the input ordering
    (source block first, then target block, when built on stacked data).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise InvalidInputError(f"points must be a 2-D matrix, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidInputError("points contain non-finite values")
    sq = squareform(pdist(pts, "sqeuclidean"))
    return np.exp(-sq / (2.0 * cfg.bandwidth**2))


def cross_kernel(a, b, cfg: KernelConfig) -> np.ndarray:
    """Rectangular Gaussian kernel block k(a_i, b_j); scores new points."""
    sq = cdist(np.asarray(a, dtype=float), np.asarray(b, dtype=float), "sqeuclidean")
    return np.exp(-sq / (2.0 * cfg.bandwidth**2))
