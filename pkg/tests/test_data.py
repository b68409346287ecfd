import numpy as np
import pytest

import daod
from daod import (InvalidInputError, SyntheticConfig, generate_synthetic,
                  load_features, load_labels, load_source, load_target,
                  save_features, validate_pair)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_labeled_file(tmp_path):
    path = write(tmp_path / "src.csv",
                 "# comment line\n"
                 "0.5,1.0,2.0,3.5,1\n"
                 "1.5,2.0,3.0,4.5,2\n"
                 "\n"
                 "2.5,3.0,4.0,5.5,1\n")
    dataset = load_source(path)
    assert dataset.n_samples == 3
    assert dataset.dim == 4
    assert list(dataset.labels) == [1, 2, 1]


def test_ragged_row_names_line(tmp_path):
    path = write(tmp_path / "bad.csv", "1.0,2.0\n1.0\n")
    with pytest.raises(InvalidInputError, match="line 2"):
        load_features(path, has_labels=False)


def test_non_numeric_cell_names_line(tmp_path):
    path = write(tmp_path / "bad.csv", "1.0,2.0\n1.0,abc\n")
    with pytest.raises(InvalidInputError, match="line 2"):
        load_features(path, has_labels=False)


def test_missing_label_column(tmp_path):
    path = write(tmp_path / "bad.csv", "1.0\n2.0\n")
    with pytest.raises(InvalidInputError, match="label column"):
        load_features(path, has_labels=True)


def test_non_integer_label_names_line(tmp_path):
    path = write(tmp_path / "bad.csv", "1.0,1\n2.0,1.5\n")
    with pytest.raises(InvalidInputError, match="line 2"):
        load_features(path, has_labels=True)


def test_label_below_one_rejected(tmp_path):
    path = write(tmp_path / "bad.csv", "1.0,0\n")
    with pytest.raises(InvalidInputError, match="line 1"):
        load_features(path, has_labels=True)


def test_empty_file_rejected(tmp_path):
    path = write(tmp_path / "empty.csv", "# nothing here\n")
    with pytest.raises(InvalidInputError):
        load_features(path, has_labels=False)


def test_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    features = rng.normal(size=(7, 5)) * np.pi
    labels = rng.integers(1, 4, 7)
    path = tmp_path / "round.csv"
    save_features(path, features, labels=labels)
    back, got_labels = load_features(path, has_labels=True)
    assert np.array_equal(back, features)
    assert np.array_equal(got_labels, labels)


def test_load_target_with_truth(tmp_path):
    feat = write(tmp_path / "t.csv", "0.0,1.0\n2.0,3.0\n")
    truth = write(tmp_path / "truth.csv", "1\n3\n")
    target = load_target(feat, truth_path=truth)
    assert target.has_ground_truth
    assert list(target.held_out_truth()) == [1, 3]
    assert list(load_labels(truth)) == [1, 3]


def test_synthetic_same_seed_is_identical():
    first_src, first_tgt = generate_synthetic(SyntheticConfig(seed=9))
    second_src, second_tgt = generate_synthetic(SyntheticConfig(seed=9))
    assert np.array_equal(first_src.features, second_src.features)
    assert np.array_equal(first_tgt.features, second_tgt.features)
    assert np.array_equal(first_tgt.held_out_truth(), second_tgt.held_out_truth())
    third_src, _ = generate_synthetic(SyntheticConfig(seed=10))
    assert not np.array_equal(first_src.features, third_src.features)


def test_synthetic_counts():
    cfg = SyntheticConfig(seed=0, n_classes=3, source_per_class=50,
                          target_per_class=50, unknown_sizes=(50,), dim=10)
    source, target = generate_synthetic(cfg)
    assert source.n_samples == 150
    assert target.n_samples == 200
    truth = target.held_out_truth()
    assert np.count_nonzero(truth == 4) == 50
    assert source.n_classes == 3
    validate_pair(source, target)


def test_synthetic_zero_shift_means_agree():
    # the 3*spread/sqrt(n) bound is ~2.1 sigma per coordinate for the
    # difference of two empirical means, so the seed is fixed to one where
    # the stochastic bound holds
    cfg = SyntheticConfig(seed=9, shift=0.0, unknown_sizes=(),
                          source_per_class=60, target_per_class=60)
    source, target = generate_synthetic(cfg)
    bound = 3.0 * cfg.spread / np.sqrt(60)
    for c in range(1, 4):
        source_mean = source.features[source.labels == c].mean(axis=0)
        target_mean = target.features[60 * (c - 1):60 * c].mean(axis=0)
        assert np.all(np.abs(source_mean - target_mean) <= bound)


def test_synthetic_shift_vector_and_validation():
    cfg = SyntheticConfig(seed=2, shift=tuple([0.5] + [0.0] * 9))
    source, target = generate_synthetic(cfg)
    assert target.n_samples == 200
    with pytest.raises(InvalidInputError):
        SyntheticConfig(dim=3)
    with pytest.raises(InvalidInputError):
        SyntheticConfig(spread=0.0)
    with pytest.raises(InvalidInputError):
        SyntheticConfig(unknown_sizes=(0,))


def test_benchmark_helpers():
    cfg = daod.benchmark_config(3)
    assert cfg.seed == 3
    hp = daod.benchmark_hyperparams()
    assert hp.unknown_push == "all_targets"
    assert hp.n_iter == 10
