"""Squared-loss empirical risks and the open-set difference diagnostic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError


def squared_loss(y, y_prime) -> float:
    """Squared Euclidean distance between two score vectors."""
    a = np.asarray(y, dtype=float).ravel()
    b = np.asarray(y_prime, dtype=float).ravel()
    if a.shape != b.shape:
        raise InvalidInputError(
            f"score vectors differ in length: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sum((a - b) ** 2))


@dataclass(frozen=True)
class RiskReport:
    """Diagnostic risks of a score matrix.

    ``delta_o_hat`` = r_t_u / prior_complement - r_s_u; it may be negative
    and is never clamped. ``prior_provenance`` records whether the prior
    complement was the unweighted default of 1 or supplied by the caller.
    """

    r_s_hat: float
    r_s_u: float
    r_t_u: float
    delta_o_hat: float
    prior_complement: float
    prior_provenance: str


def empirical_risks(scores, source_labels, n_source: int,
                    prior_complement: float = 1.0) -> RiskReport:
    """Mean squared-loss risks of a stacked score matrix.

    ``scores`` has one row per sample (source rows first) and C+1 columns;
    source rows are scored against their one-hot labels and, separately,
    against the unknown one-hot; target rows against the unknown one-hot.
    """
    if not 0.0 < prior_complement <= 1.0:
        raise InvalidInputError(
            f"prior_complement must lie in (0, 1], got {prior_complement}")
    h = np.asarray(scores, dtype=float)
    if h.ndim != 2:
        raise InvalidInputError(f"scores must be 2-D, got shape {h.shape}")
    n, width = h.shape
    if not 0 < n_source < n:
        raise InvalidInputError(
            f"n_source must split {n} rows into non-empty halves, got {n_source}")
    labels = np.asarray(source_labels, dtype=int)
    if labels.shape[0] != n_source:
        raise InvalidInputError(
            f"source_labels has length {labels.shape[0]}, expected {n_source}")
    c_total = width - 1
    if labels.min() < 1 or labels.max() > c_total:
        raise InvalidInputError("source labels must lie in 1..C")
    one_hot = np.eye(width)[labels - 1]
    unknown = np.zeros(width)
    unknown[c_total] = 1.0
    source_scores = h[:n_source]
    target_scores = h[n_source:]
    r_s_hat = float(np.mean(np.sum((source_scores - one_hot) ** 2, axis=1)))
    r_s_u = float(np.mean(np.sum((source_scores - unknown) ** 2, axis=1)))
    r_t_u = float(np.mean(np.sum((target_scores - unknown) ** 2, axis=1)))
    delta = r_t_u / prior_complement - r_s_u
    provenance = "unweighted" if prior_complement == 1.0 else "supplied"
    return RiskReport(r_s_hat=r_s_hat, r_s_u=r_s_u, r_t_u=r_t_u,
                      delta_o_hat=float(delta),
                      prior_complement=float(prior_complement),
                      prior_provenance=provenance)
