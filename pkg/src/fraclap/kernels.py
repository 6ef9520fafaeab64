"""Closed-form kernels and normalization constants.

All kernels accept points as arrays whose last axis has length ``n``; for
``n == 1`` plain scalars are accepted as well.  Evaluation is vectorized over
the leading axes.
"""

from dataclasses import dataclass
from math import gamma, pi, sin

import numpy as np

from .errors import DomainError, SingularityError, UnsupportedRegimeError

__all__ = [
    "FracParams",
    "Constants",
    "BallSpec",
    "constants",
    "sphere_area",
    "poisson_kernel",
    "avg_kernel",
    "riesz_kernel",
    "as_points",
]


@dataclass(frozen=True)
class FracParams:
    """Dimension ``n`` and order ``alpha`` of the operator (-Laplacian)^(alpha/2)."""

    n: int
    alpha: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")
        if not 0.0 < float(self.alpha) < 2.0:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class Constants:
    c_pizzetti: float
    c_norm: float
    # None when n <= alpha (no Riesz fundamental solution of this form)
    c_riesz: float | None


@dataclass(frozen=True)
class BallSpec:
    """Centered ball of radius ``r`` in dimension ``params.n``."""

    r: float
    params: FracParams

    def __post_init__(self):
        if not float(self.r) > 0.0:
            raise DomainError(f"ball radius must be positive, got {self.r!r}")
        object.__setattr__(self, "r", float(self.r))

    @property
    def n(self):
        return self.params.n

    @property
    def alpha(self):
        return self.params.alpha


def sphere_area(n):
    """Surface area of the unit sphere S^{n-1} in R^n (2 for n = 1)."""
    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


def constants(params):
    """Return the Pizzetti/Poisson constant, C_{n,alpha} and the Riesz constant."""
    n, a = params.n, params.alpha
    c_pizzetti = gamma(n / 2.0) / pi ** (n / 2.0 + 1.0) * sin(pi * a / 2.0)
    c_norm = a * 2.0 ** (a - 1.0) * gamma((n + a) / 2.0) / (pi ** (n / 2.0) * gamma(1.0 - a / 2.0))
    c_riesz = None
    if n > a:
        c_riesz = gamma((n - a) / 2.0) / (2.0 ** a * pi ** (n / 2.0) * gamma(a / 2.0))
    return Constants(c_pizzetti=c_pizzetti, c_norm=c_norm, c_riesz=c_riesz)


def as_points(y, n):
    """Coerce ``y`` to a float array with trailing axis ``n``."""
    y = np.asarray(y, dtype=float)
    if n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., np.newaxis]
    if y.shape[-1] != n:
        raise DomainError(f"points must have trailing dimension {n}, got shape {y.shape}")
    return y


def _norm(y):
    return np.sqrt(np.sum(y * y, axis=-1))


def poisson_kernel(y, x, ball):
    """Exterior-ball Poisson kernel P_r(y, x) for |x| < r.

    Zero for |y| < r.  Raises on |y| == r and on |x| >= r.
    """
    n, a, r = ball.n, ball.alpha, ball.r
    x = as_points(x, n)
    y = as_points(y, n)
    ax = _norm(x)
    if np.any(ax >= r):
        raise DomainError("poisson_kernel requires |x| < r")
    ay = _norm(y)
    if np.any(ay == r):
        raise SingularityError("poisson_kernel is singular on the sphere |y| = r")
    c = constants(ball.params).c_pizzetti
    outside = ay > r
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (r * r - ax * ax) / (ay * ay - r * r)
        val = c * ratio ** (a / 2.0) * _norm(x - y) ** (-n)
    out = np.where(outside, val, 0.0)
    return out[()] if out.ndim == 0 else out


def avg_kernel(x, ball):
    """Averaging kernel supported outside the ball: c r^a (|x|^2 - r^2)^(-a/2) |x|^(-n)."""
    n, a, r = ball.n, ball.alpha, ball.r
    x = as_points(x, n)
    ax = _norm(x)
    if np.any(ax == r):
        raise SingularityError("avg_kernel is singular on the sphere |x| = r")
    c = constants(ball.params).c_pizzetti
    with np.errstate(divide="ignore", invalid="ignore"):
        val = c * r ** a * (ax * ax - r * r) ** (-a / 2.0) * ax ** (-n)
    out = np.where(ax > r, val, 0.0)
    return out[()] if out.ndim == 0 else out


def riesz_kernel(x, z, params):
    """Fundamental solution c_riesz |x - z|^(alpha - n), defined for n > alpha."""
    n, a = params.n, params.alpha
    c = constants(params).c_riesz
    if c is None:
        raise UnsupportedRegimeError(f"Riesz kernel needs n > alpha (n={n}, alpha={a})")
    d = _norm(as_points(x, n) - as_points(z, n))
    if np.any(d == 0.0):
        raise SingularityError("riesz_kernel evaluated at its pole")
    out = c * d ** (a - n)
    return out[()] if np.ndim(out) == 0 else out
