"""Domain types shared by every other module: datasets, hyperparameters,
class partitions, and pairing validation.

Class indices are 1-based at the API surface (1..C for the known classes,
C+1 meaning "unknown"). Index arrays stored on partitions are 0-based row
indices into the corresponding feature matrix. All types are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DimensionMismatchError, InvalidInputError, NonFiniteError

UNKNOWN_PUSH_MODES = ("pseudo_unknown_only", "all_targets")


def _check_features(features, name: str) -> np.ndarray:
    arr = np.array(features, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"{name} must have at least one row and one column")
    finite = np.isfinite(arr).all(axis=1)
    if not finite.all():
        row = int(np.flatnonzero(~finite)[0])
        raise NonFiniteError(f"{name} row {row} contains a non-finite value", row=row)
    arr.flags.writeable = False
    return arr


def _check_labels(labels, low: int, high: Optional[int], expected_len: Optional[int],
                  name: str) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D vector")
    if arr.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if expected_len is not None and arr.shape[0] != expected_len:
        raise InvalidInputError(
            f"{name} has length {arr.shape[0]}, expected {expected_len}")
    if not np.issubdtype(arr.dtype, np.integer):
        with np.errstate(invalid="ignore"):
            integral = np.all(np.isfinite(arr.astype(float))) and np.all(np.mod(arr, 1) == 0)
        if not integral:
            raise InvalidInputError(f"{name} must contain integer class indices")
    arr = arr.astype(int)
    bad = (arr < low) if high is None else ((arr < low) | (arr > high))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        bound = f"{low}.." if high is None else f"{low}..{high}"
        raise InvalidInputError(f"{name}[{i}] = {arr[i]} outside the valid range {bound}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LabeledDataset:
    """Source-domain samples: feature rows plus 1-based class labels.

    ``n_classes`` is inferred from the labels when omitted.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int = 0

    def __post_init__(self):
        features = _check_features(self.features, "features")
        raw = np.asarray(self.labels)
        n_classes = int(self.n_classes) if self.n_classes else int(np.max(raw))
        if n_classes < 1:
            raise InvalidInputError(f"n_classes must be at least 1, got {n_classes}")
        labels = _check_labels(raw, 1, n_classes, features.shape[0], "labels")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", n_classes)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def class_indices(self, c: int) -> np.ndarray:
        """0-based row indices of the samples labelled with 1-based class c."""
        return np.flatnonzero(self.labels == c)


class TargetDataset:
    """Target-domain samples: unlabeled feature rows.

    Ground truth, when supplied, is held out for evaluation only: it is
    reachable solely through :meth:`held_out_truth` and is never read by the
    fitting path.
    """

    __slots__ = ("features", "_truth")

    def __init__(self, features, ground_truth=None):
        self.features = _check_features(features, "target features")
        truth = None
        if ground_truth is not None:
            truth = _check_labels(ground_truth, 1, None, self.features.shape[0],
                                  "ground_truth")
        self._truth = truth

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def has_ground_truth(self) -> bool:
        return self._truth is not None

    def held_out_truth(self) -> np.ndarray:
        """Evaluation-only labels in 1..C+1; raises when none were supplied."""
        if self._truth is None:
            raise InvalidInputError("this TargetDataset carries no ground truth")
        return self._truth

    def __repr__(self):
        truth = "with" if self.has_ground_truth else "no"
        return (f"TargetDataset(n_samples={self.n_samples}, dim={self.dim}, "
                f"{truth} ground truth)")


@dataclass(frozen=True)
class LabelAssignment:
    """Per-target class assignment in 1..C+1, where C+1 marks unknown."""

    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        if self.n_classes < 1:
            raise InvalidInputError(f"n_classes must be at least 1, got {self.n_classes}")
        labels = _check_labels(self.labels, 1, self.n_classes + 1, None, "labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", int(self.n_classes))

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def unknown_label(self) -> int:
        return self.n_classes + 1

    @property
    def unknown_mask(self) -> np.ndarray:
        return self.labels == self.unknown_label

    def changes_from(self, other: "LabelAssignment") -> int:
        if len(other) != len(self):
            raise InvalidInputError("assignments have different lengths")
        return int(np.count_nonzero(self.labels != other.labels))


@dataclass(frozen=True)
class Hyperparams:
    """Weights and loop controls of the aligned kernel solver.

    lam
        Weight of the distribution-alignment (MMD) term.
    rho
        Weight of the graph-manifold smoothness term.
    sigma
        Ridge weight on the RKHS norm; must be positive.
    alpha
        Weight pushing target samples toward the unknown class.
    gamma
        Weight pulling source samples away from the unknown class.  The
        closed form requires ``gamma < 1``; construction rejects anything
        else.
    n_neighbors
        Neighbourhood size of the affinity graph.
    threshold
        Distance-ratio threshold of the nearest-neighbour pseudo-labeler,
        strictly inside (0, 1).
    n_iter
        Number of pseudo-label refinement iterations.
    jitter
        Base diagonal stabilizer added to the kernel matrix when the
        factorization reports near-singularity.
    unknown_push
        Which target columns receive the unknown one-hot in the label
        matrix: only the pseudo-unknown ones (default) or all of them.
    """

    lam: float = 500.0
    rho: float = 1.0
    sigma: float = 1.0
    alpha: float = 0.4
    gamma: float = 0.25
    n_neighbors: int = 10
    threshold: float = 0.5
    n_iter: int = 10
    jitter: float = 1e-8
    unknown_push: str = "pseudo_unknown_only"

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise InvalidInputError(f"lam must be a nonnegative real, got {self.lam}")
        if not np.isfinite(self.rho) or self.rho < 0:
            raise InvalidInputError(f"rho must be a nonnegative real, got {self.rho}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InvalidInputError(f"sigma must be positive, got {self.sigma}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidInputError(f"alpha must be a nonnegative real, got {self.alpha}")
        if not np.isfinite(self.gamma) or not 0.0 <= self.gamma < 1.0:
            raise InvalidInputError(
                f"gamma must lie in [0, 1); got {self.gamma}")
        if int(self.n_neighbors) < 1:
            raise InvalidInputError(f"n_neighbors must be positive, got {self.n_neighbors}")
        if not 0.0 < self.threshold < 1.0:
            raise InvalidInputError(f"threshold must lie in (0, 1), got {self.threshold}")
        if int(self.n_iter) < 1:
            raise InvalidInputError(f"n_iter must be positive, got {self.n_iter}")
        if not np.isfinite(self.jitter) or self.jitter < 0:
            raise InvalidInputError(f"jitter must be a nonnegative real, got {self.jitter}")
        if self.unknown_push not in UNKNOWN_PUSH_MODES:
            raise InvalidInputError(
                f"unknown_push must be one of {UNKNOWN_PUSH_MODES}, got {self.unknown_push!r}")
        object.__setattr__(self, "n_neighbors", int(self.n_neighbors))
        object.__setattr__(self, "n_iter", int(self.n_iter))


@dataclass(frozen=True)
class ClassPartition:
    """Index bookkeeping for one pseudo-labelling of the target domain.

    ``source_by_class`` / ``target_by_class`` hold one 0-based index array
    per known class (possibly empty); ``target_known`` is their disjoint
    union and ``target_unknown`` the complement.
    """

    source_by_class: tuple
    target_by_class: tuple
    target_known: np.ndarray
    target_unknown: np.ndarray

    def __post_init__(self):
        if len(self.source_by_class) != len(self.target_by_class):
            raise InvalidInputError("source and target class lists differ in length")
        known = np.asarray(self.target_known, dtype=int)
        unknown = np.asarray(self.target_unknown, dtype=int)
        merged = np.sort(np.concatenate([a.ravel() for a in self.target_by_class] or
                                        [np.empty(0, dtype=int)]))
        if not np.array_equal(merged, np.sort(known)):
            raise InvalidInputError("target_known must be the union of target_by_class")
        everything = np.sort(np.concatenate([known, unknown]))
        if not np.array_equal(everything, np.arange(everything.size)):
            raise InvalidInputError("target indices must cover 0..n_t-1 exactly once")

    @property
    def n_classes(self) -> int:
        return len(self.source_by_class)

    @property
    def n_source(self) -> int:
        return int(sum(idx.size for idx in self.source_by_class))

    @property
    def n_target(self) -> int:
        return int(self.target_known.size + self.target_unknown.size)

    @property
    def n_target_known(self) -> int:
        return int(self.target_known.size)

    def source_count(self, c: int) -> int:
        return int(self.source_by_class[c - 1].size)

    def target_count(self, c: int) -> int:
        return int(self.target_by_class[c - 1].size)


def partition_by_class(source: LabeledDataset, pseudo: LabelAssignment) -> ClassPartition:
    """Split source rows by label and target rows by pseudo-label.

    Classes with no members appear with empty index lists; pseudo-unknown
    targets land in ``target_unknown``.
    """
    if pseudo.n_classes != source.n_classes:
        raise InvalidInputError(
            f"pseudo labels assume {pseudo.n_classes} classes, source has {source.n_classes}")
    c_total = source.n_classes
    src = tuple(np.flatnonzero(source.labels == c) for c in range(1, c_total + 1))
    tgt = tuple(np.flatnonzero(pseudo.labels == c) for c in range(1, c_total + 1))
    unknown = np.flatnonzero(pseudo.unknown_mask)
    known = np.flatnonzero(~pseudo.unknown_mask)
    return ClassPartition(source_by_class=src, target_by_class=tgt,
                          target_known=known, target_unknown=unknown)


def validate_pair(source: LabeledDataset, target: TargetDataset) -> None:
    """Check that a source/target pair is jointly usable.

    Raises with the offending row index on dimension mismatch, non-finite
    features, or out-of-range held-out truth; succeeds silently otherwise.
    """
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"source feature dimension {source.dim} != target feature dimension {target.dim}")
    for name, arr in (("source", source.features), ("target", target.features)):
        finite = np.isfinite(arr).all(axis=1)
        if not finite.all():
            row = int(np.flatnonzero(~finite)[0])
            raise NonFiniteError(f"{name} row {row} contains a non-finite value", row=row)
    if target.has_ground_truth:
        truth = target.held_out_truth()
        high = source.n_classes + 1
        if truth.max() > high:
            i = int(np.flatnonzero(truth > high)[0])
            raise InvalidInputError(
                f"ground_truth[{i}] = {truth[i]} exceeds the unknown index {high}")


def stack_features(source: LabeledDataset, target: TargetDataset) -> np.ndarray:
    """Stacked feature matrix: source rows first, then target rows."""
    return np.vstack([source.features, target.features])
