"""scikit-learn style wrappers.

These let the operators sit inside a ``Pipeline``: rows of ``X`` are points,
and the fitted state is the function being operated on.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .functions import FunctionSpec, Samples
from .kernels import BallSpec, FracParams
from .operators import frac_laplacian_pv
from .poisson import ExtensionProblem, poisson_extend
from .quadrature import DEFAULT_CONFIG

__all__ = ["FracLaplacianTransformer", "PoissonExtensionRegressor"]


class FracLaplacianTransformer(TransformerMixin, BaseEstimator):
    """Map points to (-Laplacian)^(alpha/2) u evaluated there.

    ``spec`` is a FunctionSpec or its JSON dict.  ``fit`` only validates the
    dimension; ``transform`` returns an (m, 1) column (or (m, 2) with the
    error bound when ``with_error`` is set).
    """

    def __init__(self, spec=None, alpha=1.0, normalized=True, with_error=False, cfg=DEFAULT_CONFIG):
        self.spec = spec
        self.alpha = alpha
        self.normalized = normalized
        self.with_error = with_error
        self.cfg = cfg

    def fit(self, X, y=None):
        X = check_array(X)
        f = self.spec if isinstance(self.spec, FunctionSpec) else FunctionSpec.from_dict(self.spec)
        self.params_ = FracParams(f.n, self.alpha)
        if X.shape[1] != f.n:
            raise ValueError(f"X has {X.shape[1]} columns but the function lives in R^{f.n}")
        self.function_ = f
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "function_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        out = []
        for x in X:
            r = frac_laplacian_pv(self.function_, x, self.params_, self.cfg)
            v, e = (r.normalized, r.normalized_error) if self.normalized else (r.unnormalized, r.unnormalized_error)
            out.append((v, e) if self.with_error else (v,))
        return np.array(out, dtype=float).reshape(len(X), 2 if self.with_error else 1)


class PoissonExtensionRegressor(RegressorMixin, BaseEstimator):
    """Fit on 1-D exterior samples (|x| > r), predict the alpha-harmonic extension.

    Training samples are joined piecewise linearly; beyond the outermost
    samples the data decays like (1 + dist)^(-decay_exponent).  Predictions at
    points outside the ball return the interpolated data itself.
    """

    def __init__(self, alpha=1.0, r=1.0, decay_exponent=0.0, cfg=DEFAULT_CONFIG):
        self.alpha = alpha
        self.r = r
        self.decay_exponent = decay_exponent
        self.cfg = cfg

    def fit(self, X, y):
        X, y = check_array(X), np.asarray(y, dtype=float).ravel()
        if X.shape[1] != 1:
            raise ValueError("PoissonExtensionRegressor supports one-dimensional inputs only")
        if len(y) != len(X):
            raise ValueError("X and y have different lengths")
        x = X[:, 0]
        outside = np.abs(x) > self.r
        if np.sum(x > self.r) < 1 or np.sum(x < -self.r) < 1:
            raise ValueError("need training samples on both sides of the ball")
        data = Samples(x[outside], y[outside], self.decay_exponent)
        self.problem_ = ExtensionProblem(data, BallSpec(self.r, FracParams(1, self.alpha)), self.cfg)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "problem_")
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError("expected one column")
        return np.array([poisson_extend(self.problem_, x) for x in X])
