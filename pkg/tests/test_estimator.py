import numpy as np
import pytest
from sklearn.base import clone

import daod
from daod import DAOD, OSNNClassifier, SyntheticConfig, generate_synthetic


@pytest.fixture(scope="module")
def small_data():
    cfg = SyntheticConfig(seed=4, source_per_class=15, target_per_class=15,
                          unknown_sizes=(15,), dim=6)
    source, target = generate_synthetic(cfg)
    return source, target


def test_fit_predict_shapes(small_data):
    source, target = small_data
    model = DAOD(lam=10.0, n_iter=3, n_neighbors=4)
    model.fit(source.features, source.labels, target.features)
    predictions = model.predict()
    assert predictions.shape == (target.n_samples,)
    assert set(np.unique(predictions)) <= {1, 2, 3, 4}
    scores = model.decision_function()
    assert scores.shape == (target.n_samples, 4)
    assert np.array_equal(np.argmax(scores, axis=1) + 1, predictions)


def test_predict_on_new_points_uses_kernel_expansion(small_data):
    source, target = small_data
    model = DAOD(lam=10.0, n_iter=2, n_neighbors=4)
    model.fit(source.features, source.labels, target.features)
    again = model.predict(target.features)
    assert np.array_equal(again, model.predict())


def test_metrics_attached_when_truth_supplied(small_data):
    source, target = small_data
    model = DAOD(lam=10.0, n_iter=2, n_neighbors=4)
    model.fit(source.features, source.labels, target.features,
              target_truth=target.held_out_truth())
    assert model.report_.metrics is not None
    assert 0.0 <= model.report_.metrics.acc_os <= 1.0


def test_get_params_roundtrip_and_clone():
    model = DAOD(lam=42.0, gamma=0.3)
    params = model.get_params()
    assert params["lam"] == 42.0
    assert params["gamma"] == 0.3
    copy = clone(model)
    assert copy.get_params() == params
    copy.set_params(rho=0.0)
    assert copy.rho == 0.0


def test_invalid_params_raise_at_fit(small_data):
    source, target = small_data
    model = DAOD(gamma=1.5)
    with pytest.raises(daod.InvalidInputError):
        model.fit(source.features, source.labels, target.features)


def test_osnn_classifier(small_data):
    source, target = small_data
    model = OSNNClassifier(threshold=0.5).fit(source.features, source.labels)
    predictions = model.predict(target.features)
    assert predictions.shape == (target.n_samples,)
    expected = daod.label_targets(daod.TargetDataset(target.features),
                                  daod.LabeledDataset(source.features, source.labels),
                                  0.5)
    assert np.array_equal(predictions, expected.labels)
    assert list(clone(model).get_params().values()) == [0.5]
