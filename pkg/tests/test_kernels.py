import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclap.errors import DomainError, SingularityError, UnsupportedRegimeError
from fraclap.kernels import BallSpec, FracParams, avg_kernel, constants, poisson_kernel, riesz_kernel

alphas = st.floats(0.05, 1.95)
dims = st.integers(1, 3)


@pytest.mark.parametrize("alpha", [0.0, 2.0, -0.3, 2.5, math.nan])
def test_params_reject_bad_alpha(alpha):
    with pytest.raises(DomainError):
        FracParams(1, alpha)


@pytest.mark.parametrize("n", [0, -1, 1.5])
def test_params_reject_bad_dimension(n):
    with pytest.raises(DomainError):
        FracParams(n, 1.0)


def test_ball_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        BallSpec(0.0, FracParams(1, 1.0))


def test_constants_known_values():
    # gamma-function evaluations done by hand: Gamma(1/2) = sqrt(pi), Gamma(1) = 1
    c = constants(FracParams(1, 1.0))
    assert c.c_pizzetti == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert c.c_norm == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert c.c_riesz is None
    assert constants(FracParams(2, 1.0)).c_pizzetti == pytest.approx(1.0 / math.pi ** 2, rel=1e-15)
    assert constants(FracParams(2, 1.0)).c_riesz == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)


def test_c_norm_closed_form_n3():
    # C_{3,alpha} = alpha 2^(alpha-1) Gamma((3+alpha)/2) / (pi^(3/2) Gamma(1-alpha/2)); alpha = 1 gives 1/pi^2
    assert constants(FracParams(3, 1.0)).c_norm == pytest.approx(1.0 / math.pi ** 2, rel=1e-14)


@given(dims, alphas)
def test_constants_positive(n, a):
    c = constants(FracParams(n, a))
    assert c.c_pizzetti > 0 and c.c_norm > 0
    assert (c.c_riesz is None) == (not n > a)
    if c.c_riesz is not None:
        assert c.c_riesz > 0


def test_poisson_kernel_value():
    # (1/pi) (1/3)^(1/2) (1/2)
    ball = BallSpec(1.0, FracParams(1, 1.0))
    assert poisson_kernel([2.0], [0.0], ball) == pytest.approx(0.091888149236965342, rel=1e-14)
    assert avg_kernel([2.0], ball) == pytest.approx(0.091888149236965342, rel=1e-14)


def test_kernels_vanish_inside():
    ball = BallSpec(2.0, FracParams(2, 0.7))
    assert poisson_kernel([0.5, 0.1], [0.3, 0.0], ball) == 0.0
    assert avg_kernel([1.0, -1.0], ball) == 0.0


def test_kernel_domain_errors():
    ball = BallSpec(1.0, FracParams(2, 1.0))
    with pytest.raises(SingularityError):
        poisson_kernel([1.0, 0.0], [0.0, 0.0], ball)
    with pytest.raises(DomainError):
        poisson_kernel([2.0, 0.0], [1.0, 0.0], ball)
    with pytest.raises(SingularityError):
        avg_kernel([0.0, 1.0], ball)


@given(dims, alphas, st.floats(1.01, 50.0), st.floats(0.1, 3.0))
def test_poisson_kernel_at_center_is_avg_kernel(n, a, t, r):
    ball = BallSpec(r, FracParams(n, a))
    y = np.r_[t * r, np.zeros(n - 1)]
    assert poisson_kernel(y, np.zeros(n), ball) == pytest.approx(avg_kernel(y, ball), rel=1e-14)


@given(dims, alphas, st.floats(1.001, 20.0), st.floats(0.0, 0.99))
def test_kernels_positive_outside(n, a, t, s):
    ball = BallSpec(1.0, FracParams(n, a))
    y = np.r_[np.zeros(n - 1), t]
    x = np.r_[s, np.zeros(n - 1)]
    assert poisson_kernel(y, x, ball) > 0
    assert avg_kernel(y, ball) > 0


def test_riesz_kernel_unit_distance_and_homogeneity():
    p = FracParams(2, 1.0)
    c = constants(p).c_riesz
    assert riesz_kernel([1.0, 0.0], [0.0, 0.0], p) == pytest.approx(c, rel=1e-15)
    assert riesz_kernel([2.0, 0.0], [0.0, 0.0], p) == pytest.approx(c / 2.0, rel=1e-15)


@given(st.integers(2, 3), alphas, st.floats(0.1, 10.0))
def test_riesz_kernel_scaling(n, a, lam):
    p = FracParams(n, a)
    x, z = np.r_[0.3, np.zeros(n - 1)], np.r_[np.zeros(n - 1), -1.2]
    lhs = riesz_kernel(lam * x, lam * z, p)
    assert lhs == pytest.approx(lam ** (a - n) * riesz_kernel(x, z, p), rel=1e-12)


def test_riesz_kernel_errors():
    with pytest.raises(UnsupportedRegimeError):
        riesz_kernel([1.0], [0.0], FracParams(1, 1.5))
    with pytest.raises(SingularityError):
        riesz_kernel([1.0, 1.0], [1.0, 1.0], FracParams(2, 1.0))
