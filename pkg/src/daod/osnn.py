"""Open-set nearest-neighbour pseudo-labeler with a distance-ratio test.

A query takes the shared label of its two nearest source samples when they
agree. When they disagree, the ratio of the two distances decides: small
ratios keep the nearer neighbour's label, large ratios reject the query as
unknown (class C+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .core import LabelAssignment, LabeledDataset, TargetDataset
from .exceptions import InvalidInputError


@dataclass(frozen=True)
class OsnnDecision:
    """One classification outcome.

    ``ratio`` is None when the two neighbours agreed on a label; otherwise
    it is the distance ratio that was compared against the threshold.
    """

    label: int
    ratio: Optional[float]
    neighbor_indices: tuple


def _check_inputs(source: LabeledDataset, threshold: float) -> None:
    if source.n_samples < 2:
        raise InvalidInputError("need at least two source samples for the two-NN rule")
    if not 0.0 < threshold < 1.0:
        raise InvalidInputError(f"threshold must lie in (0, 1), got {threshold}")


def osnn_classify(query, source: LabeledDataset, threshold: float) -> OsnnDecision:
    """Classify one feature vector against the labelled source samples."""
    _check_inputs(source, threshold)
    q = np.asarray(query, dtype=float).ravel()
    if q.shape[0] != source.dim:
        raise InvalidInputError(
            f"query has dimension {q.shape[0]}, source has {source.dim}")
    dist = np.linalg.norm(source.features - q, axis=1)
    order = np.argsort(dist, kind="stable")
    v, u = int(order[0]), int(order[1])
    label_v, label_u = int(source.labels[v]), int(source.labels[u])
    if label_v == label_u:
        return OsnnDecision(label=label_v, ratio=None, neighbor_indices=(v, u))
    ratio = 0.0 if dist[u] == 0.0 else float(dist[v] / dist[u])
    label = label_v if ratio <= threshold else source.n_classes + 1
    return OsnnDecision(label=label, ratio=ratio, neighbor_indices=(v, u))


def label_targets(target: TargetDataset, source: LabeledDataset,
                  threshold: float) -> LabelAssignment:
    """Apply the two-NN ratio rule to every target row."""
    _check_inputs(source, threshold)
    if target.dim != source.dim:
        raise InvalidInputError(
            f"target dimension {target.dim} != source dimension {source.dim}")
    dist = cdist(target.features, source.features)
    order = np.argsort(dist, axis=1, kind="stable")
    rows = np.arange(target.n_samples)
    v, u = order[:, 0], order[:, 1]
    dist_v, dist_u = dist[rows, v], dist[rows, u]
    label_v = source.labels[v]
    label_u = source.labels[u]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dist_u == 0.0, 0.0, dist_v / np.where(dist_u == 0.0, 1.0, dist_u))
    labels = np.where(label_v == label_u, label_v,
                      np.where(ratio <= threshold, label_v, source.n_classes + 1))
    return LabelAssignment(labels=labels, n_classes=source.n_classes)
