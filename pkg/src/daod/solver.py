"""Label/weight system assembly, the regularized objective, its closed-form
minimizer, and the iterative refinement driver.

The model scores every sample on C+1 classes (the extra class collects
unknowns) through a kernel expansion h(x) = sum_i beta_i k(x_i, x) over the
stacked source+target rows. The objective is a weighted squared loss with
three quadratic regularizers: MMD alignment, graph smoothness (entering as
2L so the penalty equals the pairwise weighted sum of squared score
differences), and a ridge term, minus a weighted term that pushes source
scores away from the unknown one-hot. For gamma < 1 the objective is
strictly convex in beta and the stationary point below is its unique
minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .alignment import (adaptive_factor, combine, marginal_mmd_matrix,
                        mmd_conditional, mmd_marginal)
from .core import (Hyperparams, LabelAssignment, LabeledDataset, TargetDataset,
                   partition_by_class, stack_features, validate_pair)
from .exceptions import InvalidInputError, NumericalError
from .graph import knn_affinity, laplacian
from .kernels import kernel_matrix, median_bandwidth
from .metrics import MetricsReport
from .osnn import label_targets
from .risk import empirical_risks

MAX_JITTER = 1e-4


@dataclass(frozen=True)
class SolveSystem:
    """Everything entering one closed-form solve, in stacked row order
    (source rows first, then target rows).

    ``y`` and ``y_tilde`` are (C+1) x n label matrices; ``a_sq`` and
    ``a_tilde_sq`` the squared diagonal sample weights of the two loss
    terms; ``k``, ``m``, ``l`` the kernel, combined MMD, and Laplacian
    matrices.
    """

    y: np.ndarray
    y_tilde: np.ndarray
    a_sq: np.ndarray
    a_tilde_sq: np.ndarray
    k: np.ndarray
    m: np.ndarray
    l: np.ndarray
    hp: Hyperparams
    n_source: int
    n_target: int

    def __post_init__(self):
        n = self.n_source + self.n_target
        for name in ("k", "m", "l"):
            mat = getattr(self, name)
            if mat.shape != (n, n):
                raise InvalidInputError(f"{name} must have shape {(n, n)}, got {mat.shape}")
        if self.y.shape != self.y_tilde.shape or self.y.shape[1] != n:
            raise InvalidInputError("label matrices must be (C+1) x (n_source+n_target)")
        if self.a_sq.shape != (n,) or self.a_tilde_sq.shape != (n,):
            raise InvalidInputError("weight diagonals must have length n_source+n_target")

    @property
    def n_classes(self) -> int:
        return self.y.shape[0] - 1


@dataclass(frozen=True)
class SolveInfo:
    """How a solve went: jitter actually applied, final residual, attempts."""

    jitter: float
    residual: float
    attempts: int


def build_system(source: LabeledDataset, target: TargetDataset,
                 pseudo: LabelAssignment, k, m, l, hp: Hyperparams) -> SolveSystem:
    """Assemble label matrices and sample weights for one solve.

    Source columns of ``y`` are one-hot on rows 1..C. Under the default
    ``unknown_push="pseudo_unknown_only"`` the unknown row C+1 is set only
    for pseudo-unknown target columns (pseudo-known targets keep an all-zero
    column); under ``"all_targets"`` it is set for every target column.
    ``y_tilde`` marks row C+1 on all source columns. Weights: source 1/n_s
    in both diagonals; targets alpha/n_t in ``a_sq`` and 0 in
    ``a_tilde_sq``.
    """
    n_s, n_t = source.n_samples, target.n_samples
    if len(pseudo) != n_t:
        raise InvalidInputError(
            f"pseudo assignment has length {len(pseudo)}, expected {n_t}")
    if pseudo.n_classes != source.n_classes:
        raise InvalidInputError("pseudo assignment and source disagree on C")
    c_total = source.n_classes
    n = n_s + n_t
    y = np.zeros((c_total + 1, n))
    y[source.labels - 1, np.arange(n_s)] = 1.0
    if hp.unknown_push == "all_targets":
        y[c_total, n_s:] = 1.0
    else:
        y[c_total, n_s + np.flatnonzero(pseudo.unknown_mask)] = 1.0
    y_tilde = np.zeros((c_total + 1, n))
    y_tilde[c_total, :n_s] = 1.0
    a_sq = np.concatenate([np.full(n_s, 1.0 / n_s), np.full(n_t, hp.alpha / n_t)])
    a_tilde_sq = np.concatenate([np.full(n_s, 1.0 / n_s), np.zeros(n_t)])
    return SolveSystem(y=y, y_tilde=y_tilde, a_sq=a_sq, a_tilde_sq=a_tilde_sq,
                       k=np.asarray(k, dtype=float), m=np.asarray(m, dtype=float),
                       l=np.asarray(l, dtype=float), hp=hp,
                       n_source=n_s, n_target=n_t)


def objective(system: SolveSystem, beta) -> float:
    """Value of the full training objective at the given coefficients."""
    b = np.asarray(beta, dtype=float)
    kb = system.k @ b
    err = system.y - kb.T
    main = np.einsum("cj,j,cj->", err, system.a_sq, err)
    err_tilde = system.y_tilde - kb.T
    pushed = np.einsum("cj,j,cj->", err_tilde, system.a_tilde_sq, err_tilde)
    quad = system.hp.lam * system.m + 2.0 * system.hp.rho * system.l
    align = np.sum(kb * (quad @ kb))
    ridge = system.hp.sigma * np.sum(b * kb)
    return float(main - system.hp.gamma * pushed + align + ridge)


def _quadratic_operator(system: SolveSystem) -> np.ndarray:
    """PSD operator A^2 - gamma*Atilde^2 + lam*M + 2*rho*L."""
    op = system.hp.lam * system.m + 2.0 * system.hp.rho * system.l
    diag = system.a_sq - system.hp.gamma * system.a_tilde_sq
    op = op + np.diag(diag)
    return op


def _right_hand_side(system: SolveSystem) -> np.ndarray:
    return (system.a_sq[:, None] * system.y.T
            - system.hp.gamma * system.a_tilde_sq[:, None] * system.y_tilde.T)


def solve_beta_info(system: SolveSystem):
    """Closed-form coefficients plus solve diagnostics.

    Solves ((A^2 - gamma*Atilde^2 + lam*M + 2*rho*L) K + sigma*I) beta = rhs
    by LU factorization, verifying the residual of the solved system. When
    factorization fails or the residual stays above tolerance, jitter*I is
    added to K, escalating tenfold up to 1e-4 before raising NumericalError
    with a condition estimate.
    """
    if system.hp.gamma >= 1.0:
        raise InvalidInputError("the closed form requires gamma < 1")
    op = _quadratic_operator(system)
    rhs = _right_hand_side(system)
    n = op.shape[0]
    tolerance = 1e-9 * max(1.0, float(np.linalg.norm(rhs)))
    jitters = [0.0]
    jit = system.hp.jitter
    while 0.0 < jit <= MAX_JITTER:
        jitters.append(jit)
        jit *= 10.0
    attempts = 0
    for jit in jitters:
        attempts += 1
        k_j = system.k if jit == 0.0 else system.k + jit * np.eye(n)
        g = op @ k_j
        g[np.diag_indices(n)] += system.hp.sigma
        try:
            beta = lu_solve(lu_factor(g), rhs)
        except np.linalg.LinAlgError:
            continue
        residual = float(np.linalg.norm(g @ beta - rhs))
        if residual <= tolerance:
            return beta, SolveInfo(jitter=jit, residual=residual, attempts=attempts)
    condition = float(np.linalg.cond(op @ system.k + system.hp.sigma * np.eye(n)))
    raise NumericalError(
        f"closed-form solve failed after jitter escalation (condition ~ {condition:.3e})",
        condition=condition)


def solve_beta(system: SolveSystem) -> np.ndarray:
    """Unique minimizer of the objective; see solve_beta_info for details."""
    return solve_beta_info(system)[0]


def predict_scores(beta, k) -> np.ndarray:
    """Score matrix K beta: one row per stacked sample, one column per class."""
    return np.asarray(k, dtype=float) @ np.asarray(beta, dtype=float)


def predict_targets(beta, k, n_source: int, n_classes: int):
    """Argmax labels for the target block plus the full score matrix.

    Ties break toward the lower class index.
    """
    scores = predict_scores(beta, k)
    labels = np.argmax(scores[n_source:], axis=1) + 1
    return LabelAssignment(labels=labels, n_classes=n_classes), scores


@dataclass(frozen=True)
class RunReport:
    """Everything a refinement run produced.

    ``pseudo_iterations`` holds the initial nearest-neighbour assignment
    followed by one snapshot per iteration; ``pseudo_change_counts`` are the
    label flips between consecutive snapshots. ``fallback_iterations`` lists
    1-based iterations that hit the no-known-targets marginal fallback.
    ``metrics`` stays None until filled in by an evaluation step with
    held-out truth.
    """

    predictions: LabelAssignment
    scores: np.ndarray
    beta: np.ndarray
    bandwidth: float
    mu_trace: tuple
    objective_trace: tuple
    pseudo_iterations: tuple
    pseudo_change_counts: tuple
    risk_trace: tuple
    fallback_iterations: tuple
    n_source: int
    n_target: int
    n_classes: int
    hyperparams: Hyperparams
    metrics: Optional[MetricsReport] = None


def daod_fit(source: LabeledDataset, target: TargetDataset,
             hp: Optional[Hyperparams] = None) -> RunReport:
    """Run the full refinement loop and return the fitted report.

    Pseudo-labels are seeded by the two-NN ratio rule; the kernel matrix
    and Laplacian are built once (features never change); each iteration
    re-partitions by pseudo-label, re-estimates mu and the MMD matrices,
    solves for the coefficients in closed form, and re-predicts the target
    pseudo-labels. An iteration with no pseudo-known targets falls back to
    marginal alignment over all targets with mu = 1 and is flagged.
    """
    hp = hp if hp is not None else Hyperparams()
    validate_pair(source, target)
    n_s, n_t = source.n_samples, target.n_samples
    c_total = source.n_classes
    stacked = stack_features(source, target)
    cfg = median_bandwidth(stacked)
    kernel = kernel_matrix(stacked, cfg)
    lap = laplacian(knn_affinity(stacked, hp.n_neighbors))
    pseudo = label_targets(target, source, hp.threshold)
    snapshots = [pseudo]
    mu_trace = []
    objective_trace = []
    risk_trace = []
    fallback = []
    beta = None
    scores = None
    for iteration in range(1, hp.n_iter + 1):
        part = partition_by_class(source, pseudo)
        if part.n_target_known == 0:
            combined = marginal_mmd_matrix(n_s, n_t, np.arange(n_t))
            mu = 1.0
            fallback.append(iteration)
        else:
            factor = adaptive_factor(source, target, part)
            conditionals = [mmd_conditional(part, c) for c in range(1, c_total + 1)]
            combined = combine(mmd_marginal(part), conditionals, factor.mu).combined
            mu = factor.mu
        system = build_system(source, target, pseudo, kernel, combined, lap, hp)
        beta = solve_beta(system)
        pseudo, scores = predict_targets(beta, kernel, n_s, c_total)
        snapshots.append(pseudo)
        mu_trace.append(mu)
        objective_trace.append(objective(system, beta))
        risk_trace.append(empirical_risks(scores, source.labels, n_s))
    changes = tuple(after.changes_from(before)
                    for before, after in zip(snapshots, snapshots[1:]))
    return RunReport(predictions=snapshots[-1], scores=scores, beta=beta,
                     bandwidth=cfg.bandwidth, mu_trace=tuple(mu_trace),
                     objective_trace=tuple(objective_trace),
                     pseudo_iterations=tuple(snapshots),
                     pseudo_change_counts=changes,
                     risk_trace=tuple(risk_trace),
                     fallback_iterations=tuple(fallback),
                     n_source=n_s, n_target=n_t, n_classes=c_total,
                     hyperparams=hp)
