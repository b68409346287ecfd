"""Distribution-alignment machinery.

Marginal and class-conditional MMD matrices over the stacked sample order,
their convex combination under the adaptive factor mu, the projected-MMD
diagnostic, and the linear-classifier proxy distance that drives mu.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ClassPartition, LabeledDataset, TargetDataset
from .exceptions import EmptyKnownTargetsError, InvalidInputError


def marginal_mmd_matrix(n_source: int, n_target: int, known_targets) -> np.ndarray:
    """Marginal MMD matrix over stacked source+target rows.

    Rank-one form v v^T with v = 1/n_s on source rows, -1/n_tK on the
    pseudo-known target rows, and 0 on pseudo-unknown rows, so nonzero rows
    sum to zero and the matrix is PSD by construction.
    """
    known = np.asarray(known_targets, dtype=int)
    if known.size == 0:
        raise EmptyKnownTargetsError(
            "no pseudo-known target samples; the marginal MMD matrix is undefined")
    v = np.zeros(n_source + n_target)
    v[:n_source] = 1.0 / n_source
    v[n_source + known] = -1.0 / known.size
    return np.outer(v, v)


def mmd_marginal(part: ClassPartition) -> np.ndarray:
    return marginal_mmd_matrix(part.n_source, part.n_target, part.target_known)


def mmd_conditional(part: ClassPartition, c: int) -> np.ndarray:
    """Class-conditional MMD matrix for 1-based class c.

    Falls back to the zero matrix when the class has no members on either
    side.
    """
    if not 1 <= c <= part.n_classes:
        raise InvalidInputError(f"class index {c} outside 1..{part.n_classes}")
    n = part.n_source + part.n_target
    src = part.source_by_class[c - 1]
    tgt = part.target_by_class[c - 1]
    if src.size == 0 or tgt.size == 0:
        return np.zeros((n, n))
    v = np.zeros(n)
    v[src] = 1.0 / src.size
    v[part.n_source + tgt] = -1.0 / tgt.size
    return np.outer(v, v)


@dataclass(frozen=True)
class AlignmentMatrices:
    """Marginal, per-class, and combined MMD matrices plus the mixing weight."""

    m0: np.ndarray
    mc: tuple
    combined: np.ndarray
    mu: float


def combine(m0, mc_list: Sequence, mu: float) -> AlignmentMatrices:
    """Convex combination mu * M0 + (1 - mu) * sum_c Mc."""
    if not 0.0 <= mu <= 1.0:
        raise InvalidInputError(f"mu must lie in [0, 1], got {mu}")
    m0 = np.asarray(m0, dtype=float)
    mc = tuple(np.asarray(m, dtype=float) for m in mc_list)
    conditional = np.zeros_like(m0)
    for m in mc:
        conditional = conditional + m
    return AlignmentMatrices(m0=m0, mc=mc,
                             combined=mu * m0 + (1.0 - mu) * conditional,
                             mu=float(mu))


def projected_mmd(scores, group_a, group_b) -> float:
    """Euclidean distance between mean score rows of two index groups."""
    h = np.asarray(scores, dtype=float)
    a = np.asarray(group_a, dtype=int)
    b = np.asarray(group_b, dtype=int)
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("projected_mmd needs two non-empty groups")
    return float(np.linalg.norm(h[a].mean(axis=0) - h[b].mean(axis=0)))


def _two_folds(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    fold = np.zeros(n, dtype=int)
    fold[rng.permutation(n)[1::2]] = 1
    return fold


def _ridge_scores(train_x, train_y, sample_weight, test_x, regularization):
    z = np.hstack([train_x, np.ones((train_x.shape[0], 1))])
    zw = z * sample_weight[:, None]
    gram = z.T @ zw + regularization * np.eye(z.shape[1])
    coef = np.linalg.solve(gram, zw.T @ train_y)
    return np.hstack([test_x, np.ones((test_x.shape[0], 1))]) @ coef


def a_distance(features_a, features_b, regularization: float = 1.0,
               fold_seed: int = 0) -> float:
    """Proxy distribution distance 2(1 - eps) from a domain classifier.

    eps is the balanced 2-fold cross-validation error of a ridge-regularized
    least-squares classifier separating the two sample sets; the result is
    clamped into [0, 2]. Folds are drawn per set from ``fold_seed`` so the
    value is deterministic and symmetric under swapping the sets. A set with
    fewer than two rows is reported as maximally distinguishable (2.0) with
    a warning.
    """
    a = np.asarray(features_a, dtype=float)
    b = np.asarray(features_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("a_distance needs two non-empty sample sets")
    if a.shape[0] < 2 or b.shape[0] < 2:
        warnings.warn("a_distance: a set has fewer than 2 samples; reporting 2.0",
                      RuntimeWarning, stacklevel=2)
        return 2.0
    fold_a = _two_folds(a.shape[0], fold_seed)
    fold_b = _two_folds(b.shape[0], fold_seed)
    errors = []
    for held in (0, 1):
        a_train, a_test = a[fold_a != held], a[fold_a == held]
        b_train, b_test = b[fold_b != held], b[fold_b == held]
        x = np.vstack([a_train, b_train])
        y = np.concatenate([-np.ones(a_train.shape[0]), np.ones(b_train.shape[0])])
        weight = np.concatenate([
            np.full(a_train.shape[0], x.shape[0] / (2.0 * a_train.shape[0])),
            np.full(b_train.shape[0], x.shape[0] / (2.0 * b_train.shape[0])),
        ])
        err_a = float(np.mean(_ridge_scores(x, y, weight, a_test, regularization) >= 0.0))
        err_b = float(np.mean(_ridge_scores(x, y, weight, b_test, regularization) < 0.0))
        errors.append((err_a + err_b) / 2.0)
    eps = float(np.mean(errors))
    return float(np.clip(2.0 * (1.0 - eps), 0.0, 2.0))


def mu_from_distances(d0: float, dc: Sequence) -> float:
    """mu = 1 - d0 / (d0 + sum(dc)); 0.5 when there is no evidence at all.

    NaN entries in dc mark classes missing on one side and are skipped.
    """
    dc = np.asarray(dc, dtype=float)
    total = float(d0 + np.nansum(dc)) if dc.size else float(d0)
    if total <= 0.0:
        return 0.5
    return float(1.0 - d0 / total)


@dataclass(frozen=True)
class AdaptiveFactorReport:
    """One iteration's estimate of the marginal/conditional mixing weight.

    ``dc`` holds NaN for classes missing on either side; ``marginal_only``
    flags the no-known-targets fallback and ``small_sample`` that some
    distance was forced to 2.0 by a side with fewer than two rows.
    """

    d0: float
    dc: tuple
    mu: float
    marginal_only: bool = False
    small_sample: bool = False


def adaptive_factor(source: LabeledDataset, target: TargetDataset,
                    part: ClassPartition, fold_seed: int = 0) -> AdaptiveFactorReport:
    """Estimate mu from proxy distances between aligned sample groups.

    d0 compares all source rows with the pseudo-known targets; each dc
    compares the class-c rows of both domains. With no pseudo-known targets
    the marginal-only fallback mu = 1 is returned with a warning.
    """
    c_total = part.n_classes
    if part.n_target_known == 0:
        warnings.warn("adaptive_factor: no pseudo-known targets; using mu = 1",
                      RuntimeWarning, stacklevel=2)
        return AdaptiveFactorReport(d0=float("nan"), dc=(float("nan"),) * c_total,
                                    mu=1.0, marginal_only=True)
    small = part.n_target_known < 2 or source.n_samples < 2
    d0 = a_distance(source.features, target.features[part.target_known],
                    fold_seed=fold_seed)
    dc = []
    for c in range(1, c_total + 1):
        src = part.source_by_class[c - 1]
        tgt = part.target_by_class[c - 1]
        if src.size == 0 or tgt.size == 0:
            dc.append(float("nan"))
            continue
        if src.size < 2 or tgt.size < 2:
            small = True
        dc.append(a_distance(source.features[src], target.features[tgt],
                             fold_seed=fold_seed))
    mu = mu_from_distances(d0, dc)
    return AdaptiveFactorReport(d0=d0, dc=tuple(dc), mu=mu, small_sample=small)
