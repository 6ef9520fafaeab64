import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from fraclap.estimators import FracLaplacianTransformer, PoissonExtensionRegressor


def test_transformer_cosine():
    t = FracLaplacianTransformer(spec={"kind": "cosine", "params": {"k": [1.0]}}, alpha=1.0)
    out = t.fit_transform(np.array([[0.0], [math.pi]]))
    assert out.shape == (2, 1)
    assert out[:, 0] == pytest.approx([1.0, -1.0], abs=1e-8)


def test_transformer_with_error_and_unnormalized():
    t = FracLaplacianTransformer(spec={"kind": "cosine"}, alpha=1.0, normalized=False, with_error=True)
    out = t.fit(np.zeros((1, 1))).transform(np.zeros((1, 1)))
    assert out.shape == (1, 2)
    assert out[0, 0] == pytest.approx(math.pi, rel=1e-9) and out[0, 1] >= 0


def test_transformer_checks():
    t = FracLaplacianTransformer(spec={"kind": "cosine", "params": {"k": [1.0, 0.0]}})
    with pytest.raises(NotFittedError):
        t.transform(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        t.fit(np.zeros((2, 1)))
    t.fit(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        t.transform(np.zeros((1, 3)))


def test_clone_and_params():
    t = FracLaplacianTransformer(spec={"kind": "gaussian"}, alpha=0.7)
    c = clone(t)
    assert c.get_params()["alpha"] == 0.7 and c is not t


def test_regressor_constant_samples():
    x = np.r_[np.linspace(-5, -1.1, 8), np.linspace(1.1, 5, 8)]
    reg = PoissonExtensionRegressor(alpha=1.0, r=1.0)
    reg.fit(x[:, None], np.full(x.size, 2.0))
    pred = reg.predict(np.array([[0.0], [0.5], [3.0]]))
    assert pred == pytest.approx([2.0, 2.0, 2.0], abs=1e-6)


def test_regressor_needs_both_sides():
    with pytest.raises(ValueError):
        PoissonExtensionRegressor().fit(np.array([[2.0], [3.0]]), [1.0, 1.0])


def test_pipeline_composition():
    pipe = make_pipeline(FracLaplacianTransformer(spec={"kind": "constant", "params": {"value": 3.0}}, alpha=1.2))
    assert np.all(pipe.fit_transform(np.zeros((3, 1))) == 0.0)
