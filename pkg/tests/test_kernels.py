import math

import numpy as np
import pytest

from daod import InvalidInputError, KernelConfig, kernel_matrix, median_bandwidth
from daod.exceptions import DegenerateInputError
from daod.kernels import cross_kernel


def test_median_enumerated_pairs():
    # pairwise distances of {0, 1, 2} are {1, 1, 2}
    cfg = median_bandwidth([[0.0], [1.0], [2.0]])
    assert cfg.bandwidth == 1.0


def test_median_single_distance():
    cfg = median_bandwidth([[0.0, 0.0], [3.0, 4.0]])
    assert cfg.bandwidth == 5.0


def test_median_even_pair_count_averages_middle():
    # four collinear points 0,1,2,3: distances {1,1,1,2,2,3} -> (1+2)/2
    cfg = median_bandwidth([[0.0], [1.0], [2.0], [3.0]])
    assert cfg.bandwidth == 1.5


def test_median_coincident_points_degenerate():
    with pytest.raises(DegenerateInputError):
        median_bandwidth([[1.0, 1.0], [1.0, 1.0]])


def test_kernel_unit_diagonal():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(7, 3))
    k = kernel_matrix(pts, median_bandwidth(pts))
    assert np.array_equal(np.diag(k), np.ones(7))


def test_kernel_values_at_known_distances():
    cfg = KernelConfig(bandwidth=1.0)
    k = kernel_matrix([[0.0], [1.0]], cfg)
    assert k[0, 1] == pytest.approx(math.exp(-0.5), abs=1e-12)
    k2 = kernel_matrix([[0.0], [2.0]], cfg)
    assert k2[0, 1] == pytest.approx(math.exp(-2.0), abs=1e-12)


def test_kernel_symmetric_entries_in_unit_interval():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(20, 4))
    k = kernel_matrix(pts, median_bandwidth(pts))
    assert np.array_equal(k, k.T)
    assert k.min() > 0.0 and k.max() <= 1.0


def test_kernel_positive_semidefinite():
    rng = np.random.default_rng(2)
    for _ in range(5):
        pts = rng.normal(size=(25, 3))
        k = kernel_matrix(pts, median_bandwidth(pts))
        assert np.linalg.eigvalsh(k).min() >= -1e-10 * k.shape[0]


def test_kernel_row_permutation_equivariance():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(9, 2))
    cfg = median_bandwidth(pts)
    perm = rng.permutation(9)
    k = kernel_matrix(pts, cfg)
    k_perm = kernel_matrix(pts[perm], cfg)
    assert np.allclose(k_perm, k[np.ix_(perm, perm)], atol=1e-15)


def test_cross_kernel_matches_square_blocks():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=(5, 3)), rng.normal(size=(4, 3))
    cfg = KernelConfig(bandwidth=2.0)
    full = kernel_matrix(np.vstack([a, b]), cfg)
    assert np.allclose(cross_kernel(a, b, cfg), full[:5, 5:], atol=1e-14)


def test_invalid_inputs_rejected():
    with pytest.raises(InvalidInputError):
        median_bandwidth([[0.0]])
    with pytest.raises(InvalidInputError):
        kernel_matrix([[np.inf, 0.0]], KernelConfig(bandwidth=1.0))
    with pytest.raises(InvalidInputError):
        KernelConfig(bandwidth=0.0)
    with pytest.raises(InvalidInputError):
        KernelConfig(bandwidth=float("nan"))
