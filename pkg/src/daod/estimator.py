"""Scikit-learn style estimators wrapping the functional pipeline."""

from __future__ import annotations

import dataclasses

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .core import Hyperparams, LabeledDataset, TargetDataset, stack_features
from .kernels import KernelConfig, cross_kernel
from .metrics import open_set_metrics
from .osnn import label_targets
from .solver import daod_fit


class DAOD(BaseEstimator, ClassifierMixin):
    """Open-set domain adaptation classifier with a closed-form kernel solver.

    Learns score functions for the C known classes plus one unknown class
    by minimizing a weighted squared loss with distribution-alignment,
    manifold, ridge, and open-set penalties, refining target pseudo-labels
    over ``n_iter`` rounds. Predictions use 1-based class indices with
    C+1 meaning "unknown".

    Parameters
    ----------
    lam : float, default=500.0
        Weight of the MMD distribution-alignment term.
    rho : float, default=1.0
        Weight of the graph-manifold smoothness term.
    sigma : float, default=1.0
        Ridge weight; must be positive.
    alpha : float, default=0.4
        Weight steering target samples toward the unknown class.
    gamma : float, default=0.25
        Weight steering source samples away from the unknown class; the
        closed form requires ``gamma < 1``.
    n_neighbors : int, default=10
        Neighbourhood size of the affinity graph.
    threshold : float, default=0.5
        Distance-ratio threshold of the nearest-neighbour pseudo-labeler.
    n_iter : int, default=10
        Number of refinement iterations.
    jitter : float, default=1e-8
        Base diagonal stabilizer for near-singular kernel systems.
    unknown_push : {"pseudo_unknown_only", "all_targets"}
        Which target columns carry the unknown one-hot in the label matrix.

    Attributes
    ----------
    beta_ : ndarray of shape (n_source + n_target, n_classes + 1)
        Kernel-expansion coefficients.
    classes_ : ndarray
        The predictable labels ``1..C+1``.
    report_ : RunReport
        Per-iteration traces and diagnostics; carries metrics when target
        ground truth was supplied to :meth:`fit`.
    """

    def __init__(self, lam=500.0, rho=1.0, sigma=1.0, alpha=0.4, gamma=0.25,
                 n_neighbors=10, threshold=0.5, n_iter=10, jitter=1e-8,
                 unknown_push="pseudo_unknown_only"):
        self.lam = lam
        self.rho = rho
        self.sigma = sigma
        self.alpha = alpha
        self.gamma = gamma
        self.n_neighbors = n_neighbors
        self.threshold = threshold
        self.n_iter = n_iter
        self.jitter = jitter
        self.unknown_push = unknown_push

    def _hyperparams(self) -> Hyperparams:
        return Hyperparams(lam=self.lam, rho=self.rho, sigma=self.sigma,
                           alpha=self.alpha, gamma=self.gamma,
                           n_neighbors=self.n_neighbors, threshold=self.threshold,
                           n_iter=self.n_iter, jitter=self.jitter,
                           unknown_push=self.unknown_push)

    def fit(self, X, y, X_target, target_truth=None):
        """Fit on labelled source rows (X, y) and unlabeled target rows.

        ``target_truth`` is evaluation-only: when given, open-set metrics
        are attached to ``report_`` after fitting, but the labels never
        enter the fitting path.
        """
        source = LabeledDataset(features=X, labels=y)
        target = TargetDataset(features=X_target, ground_truth=target_truth)
        report = daod_fit(source, target, self._hyperparams())
        if target.has_ground_truth:
            scored = open_set_metrics(report.predictions, target.held_out_truth())
            report = dataclasses.replace(report, metrics=scored)
        self.report_ = report
        self.beta_ = report.beta
        self.X_fit_ = stack_features(source, target)
        self.kernel_config_ = KernelConfig(bandwidth=report.bandwidth)
        self.n_source_ = source.n_samples
        self.n_classes_ = source.n_classes
        self.classes_ = np.arange(1, source.n_classes + 2)
        return self

    def decision_function(self, X=None):
        """Score matrix with one column per class; target rows when X is None."""
        check_is_fitted(self, "beta_")
        if X is None:
            return self.report_.scores[self.n_source_:]
        return cross_kernel(X, self.X_fit_, self.kernel_config_) @ self.beta_

    def predict(self, X=None):
        """Argmax labels in 1..C+1; the fitted targets' labels when X is None."""
        scores = self.decision_function(X)
        return np.argmax(scores, axis=1) + 1


class OSNNClassifier(BaseEstimator, ClassifierMixin):
    """No-transfer open-set baseline: two nearest neighbours plus a ratio test.

    Parameters
    ----------
    threshold : float, default=0.5
        Distance-ratio threshold in (0, 1); disagreeing neighbours with a
        ratio above it send the query to the unknown class C+1.
    """

    def __init__(self, threshold=0.5):
        self.threshold = threshold

    def fit(self, X, y):
        self.source_ = LabeledDataset(features=X, labels=y)
        self.n_classes_ = self.source_.n_classes
        self.classes_ = np.arange(1, self.n_classes_ + 2)
        return self

    def predict(self, X):
        check_is_fitted(self, "source_")
        assignment = label_targets(TargetDataset(features=X), self.source_,
                                   self.threshold)
        return assignment.labels
