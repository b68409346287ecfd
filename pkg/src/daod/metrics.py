"""Open-set accuracy metrics: per-class recall, macro averages, confusion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabelAssignment
from .exceptions import InvalidInputError


@dataclass(frozen=True)
class MetricsReport:
    """Macro open-set accuracies and the underlying confusion matrix.

    ``acc_os`` averages per-class recall over every class present in the
    truth, unknown included; ``acc_os_star`` averages over the present
    known classes only. ``per_class`` holds NaN for classes absent from the
    truth, which are also listed (1-based) in ``excluded_classes`` and
    excluded from both averages. ``confusion`` rows are truth, columns are
    predictions.
    """

    acc_os: float
    acc_os_star: float
    per_class: np.ndarray
    confusion: np.ndarray
    excluded_classes: tuple


def open_set_metrics(pred, truth, n_classes: int = None) -> MetricsReport:
    """Score predictions in 1..C+1 against held-out truth in 1..C+1.

    ``n_classes`` (C) may be omitted when ``pred`` is a LabelAssignment.
    """
    if isinstance(pred, LabelAssignment):
        if n_classes is None:
            n_classes = pred.n_classes
        pred = pred.labels
    if n_classes is None:
        raise InvalidInputError("n_classes is required when pred is a bare array")
    p = np.asarray(pred, dtype=int)
    t = np.asarray(truth, dtype=int)
    if p.ndim != 1 or t.ndim != 1 or p.shape != t.shape:
        raise InvalidInputError(
            f"pred and truth must be equal-length vectors, got {p.shape} vs {t.shape}")
    if t.size == 0:
        raise InvalidInputError("truth must be non-empty")
    width = n_classes + 1
    for name, arr in (("pred", p), ("truth", t)):
        if arr.min() < 1 or arr.max() > width:
            raise InvalidInputError(f"{name} labels must lie in 1..{width}")
    confusion = np.zeros((width, width), dtype=int)
    np.add.at(confusion, (t - 1, p - 1), 1)
    totals = confusion.sum(axis=1)
    present = totals > 0
    per_class = np.full(width, np.nan)
    per_class[present] = np.diag(confusion)[present] / totals[present]
    acc_os = float(np.mean(per_class[present]))
    known_present = present[:n_classes]
    if known_present.any():
        acc_os_star = float(np.mean(per_class[:n_classes][known_present]))
    else:
        acc_os_star = float("nan")
    excluded = tuple(int(c) + 1 for c in np.flatnonzero(~present))
    per_class.flags.writeable = False
    confusion.flags.writeable = False
    return MetricsReport(acc_os=acc_os, acc_os_star=acc_os_star,
                         per_class=per_class, confusion=confusion,
                         excluded_classes=excluded)
