import numpy as np
import pytest

import cadapt


def test_phantom_shapes_and_determinism():
    img, labels, truth = cadapt.make_phantom(dims=(64, 64), seed=3)
    assert img.shape == (64, 64)
    assert labels.shape == (64, 64) and labels.dtype == np.uint16
    assert truth.shape == (64, 64, 3)
    np.testing.assert_allclose(truth.sum(axis=-1), 1.0, atol=1e-12)
    again, _, _ = cadapt.make_phantom(dims=(64, 64), seed=3)
    assert np.array_equal(img, again)


def test_fit_and_classify_match_numpy():
    img = np.array([[1.0, 3.0, 8.0]])
    prob = np.array([[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])
    means, variances = cadapt.fit_classifier([img], [prob])
    assert means[0] == 2.0 and variances[0] == 1.0
    post = cadapt.classify(np.array([[5.0]]), [0.0, 10.0], [1.0, 1.0])
    np.testing.assert_allclose(post[0, 0], [0.5, 0.5])


def test_centroids_match_lstsq():
    rng = np.random.default_rng(0)
    prob = rng.random((10, 12, 4))
    prob /= prob.sum(axis=-1, keepdims=True)
    img = rng.normal(size=(10, 12))
    theta = cadapt.estimate_centroids(prob, img)
    want, *_ = np.linalg.lstsq(prob.reshape(-1, 4), img.ravel(), rcond=None)
    np.testing.assert_allclose(theta, want, rtol=1e-10)
    sim = cadapt.simulate(prob, theta)
    np.testing.assert_allclose(sim, prob @ np.asarray(theta), atol=1e-12)


def test_adapt_recovers_shifted_contrast():
    img, _, truth = cadapt.make_phantom(seed=1)
    test, test_labels, _ = cadapt.make_phantom(means=(0, 7, 10), seed=2)
    result = cadapt.adapt_segment([img], [truth], test, add_noise_std=0.5, seed=3)
    assert result["converged"]
    assert result["iterations_used"] == len(result["change_fractions"]) <= 10
    assert abs(result["theta"][1] - 7.0) <= 0.2
    _, fixed = cadapt.segment_standard([img], [truth], test)
    assert cadapt.classification_error(result["labels"], test_labels) < cadapt.classification_error(
        fixed, test_labels
    )


def test_metrics_and_io(tmp_path):
    a = np.array([[0, 1], [1, 0]], dtype=np.uint16)
    b = np.array([[0, 1], [1, 1]], dtype=np.uint16)
    assert cadapt.classification_error(a, b) == 0.25
    assert cadapt.dice(a, a, 1) == 1.0
    assert cadapt.volume_consistency(a, a, [1]) == 0.0
    img = np.arange(6, dtype=float).reshape(2, 3)
    cadapt.save_volume(img, str(tmp_path / "v.cav"))
    assert np.array_equal(cadapt.load_volume(str(tmp_path / "v.cav")), img)
    labels = cadapt.soften_labels(a, 2, 0.0)
    cadapt.save_probmap(labels, str(tmp_path / "p.cap"))
    assert np.array_equal(cadapt.load_probmap(str(tmp_path / "p.cap")), labels)


def test_errors_are_raised_as_cadapt_error(tmp_path):
    with pytest.raises(cadapt.CadaptError):
        cadapt.load_volume(str(tmp_path / "missing.cav"))
    with pytest.raises(cadapt.CadaptError):
        cadapt.classification_error(np.zeros((2, 2), np.uint16), np.zeros((1, 4), np.uint16))
