"""Shared builders for randomized solver instances."""

import numpy as np

import daod
from daod.alignment import combine, mmd_conditional, mmd_marginal
from daod.core import LabelAssignment, partition_by_class, stack_features
from daod.graph import knn_affinity, laplacian
from daod.kernels import kernel_matrix, median_bandwidth
from daod.solver import build_system


def random_problem(rng, gamma=0.5, unknown_push="pseudo_unknown_only",
                   max_samples=20):
    """Small random instance plus its assembled SolveSystem."""
    n_s = int(rng.integers(6, max_samples + 1))
    n_t = int(rng.integers(6, max_samples + 1))
    d = int(rng.integers(2, 6))
    c = int(rng.integers(1, 4))
    labels = rng.integers(1, c + 1, size=n_s)
    labels[:c] = np.arange(1, c + 1)
    source = daod.LabeledDataset(rng.normal(size=(n_s, d)), labels, n_classes=c)
    target = daod.TargetDataset(rng.normal(loc=0.5, size=(n_t, d)))
    while True:
        pseudo_labels = rng.integers(1, c + 2, size=n_t)
        if (pseudo_labels <= c).any():
            break
    pseudo = LabelAssignment(pseudo_labels, c)
    hp = daod.Hyperparams(lam=float(rng.uniform(0.0, 20.0)),
                          rho=float(rng.uniform(0.0, 2.0)),
                          sigma=float(rng.uniform(0.3, 1.5)),
                          alpha=float(rng.uniform(0.0, 1.2)),
                          gamma=gamma,
                          n_neighbors=int(rng.integers(2, 5)),
                          unknown_push=unknown_push)
    stacked = stack_features(source, target)
    kernel = kernel_matrix(stacked, median_bandwidth(stacked))
    lap = laplacian(knn_affinity(stacked, hp.n_neighbors))
    part = partition_by_class(source, pseudo)
    conditionals = [mmd_conditional(part, cc) for cc in range(1, c + 1)]
    m = combine(mmd_marginal(part), conditionals, float(rng.uniform(0.0, 1.0))).combined
    system = build_system(source, target, pseudo, kernel, m, lap, hp)
    return source, target, pseudo, system


def fd_gradient(fun, beta, step=1e-5):
    """Central finite-difference gradient of a scalar function of beta."""
    grad = np.zeros_like(beta)
    for i in range(beta.shape[0]):
        for j in range(beta.shape[1]):
            plus = beta.copy()
            plus[i, j] += step
            minus = beta.copy()
            minus[i, j] -= step
            grad[i, j] = (fun(plus) - fun(minus)) / (2.0 * step)
    return grad
