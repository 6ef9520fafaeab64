import math
import warnings

import numpy as np
import pytest

from fraclap.errors import DomainError, NotInLalphaError, UnsupportedRegimeError
from fraclap.functions import Affine, Constant, Gaussian, RieszKernel
from fraclap.kernels import BallSpec, FracParams, constants
from fraclap.operators import pizzetti_quotient
from fraclap.poisson import (
    ExtendedFunction,
    ExtensionProblem,
    poisson_extend,
    poisson_gradient,
    poisson_mass,
    riesz_reproduction_residual,
)

# brute-force mpmath quadrature of int P_r(y, x) u(y) dy over |y| > r
EXTENSION_ORACLE_1D = 0.51895756121964293  # gaussian center 1.5, n=1, alpha=1, r=1, x=0.5
EXTENSION_ORACLE_2D = 0.11261114443333  # gaussian center (1.2, 0.3), sigma 0.5, n=2, alpha=0.8, x=(0.3, -0.2)


def ball(n, a, r=1.0):
    return BallSpec(r, FracParams(n, a))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [0.0, 0.5, 0.9])
def test_poisson_mass_is_one(n, t):
    x = np.r_[t, np.zeros(n - 1)]
    assert poisson_mass(ball(n, 0.6), x) == pytest.approx(1.0, abs=1e-6)


def test_poisson_mass_direction_independent():
    b = ball(2, 1.3)
    m1 = poisson_mass(b, [0.6, 0.0])
    m2 = poisson_mass(b, [0.6 / math.sqrt(2), -0.6 / math.sqrt(2)])
    assert m1 == pytest.approx(m2, abs=1e-12)


def test_constant_extension():
    p = ExtensionProblem(Constant(1.0, 2), ball(2, 0.9))
    for x in ([0.0, 0.0], [0.5, 0.2], [-0.1, 0.85]):
        assert poisson_extend(p, x) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("x", [0.0, 0.5, -0.5])
def test_affine_extension(x):
    p = ExtensionProblem(Affine([2.0], -0.5), ball(1, 1.5))
    assert poisson_extend(p, [x]) == pytest.approx(2.0 * x - 0.5, abs=1e-6)


def test_extension_outside_returns_data():
    f = Gaussian(0.3, 1.0)
    p = ExtensionProblem(f, ball(1, 1.0))
    assert poisson_extend(p, [1.7]) == f([1.7])


def test_extension_brute_force_1d():
    p = ExtensionProblem(Gaussian(1.5, 1.0), ball(1, 1.0))
    assert poisson_extend(p, [0.5]) == pytest.approx(EXTENSION_ORACLE_1D, rel=1e-9)


def test_extension_brute_force_2d():
    p = ExtensionProblem(Gaussian([1.2, 0.3], 0.5), ball(2, 0.8))
    assert poisson_extend(p, [0.3, -0.2]) == pytest.approx(EXTENSION_ORACLE_2D, rel=1e-8)


def test_extension_linearity():
    b = ball(1, 0.7)
    u, v = Gaussian(1.4, 0.6), Gaussian(-2.0, 1.3)
    x = [0.2]
    uv = poisson_extend(ExtensionProblem(2.0 * u + (-1.5) * v, b), x, full_output=True)
    pu = poisson_extend(ExtensionProblem(u, b), x, full_output=True)
    pv = poisson_extend(ExtensionProblem(v, b), x, full_output=True)
    assert abs(uv[0] - 2.0 * pu[0] + 1.5 * pv[0]) <= uv[1] + 2.0 * pu[1] + 1.5 * pv[1] + 1e-12


def test_extension_maximum_principle():
    f = Gaussian(1.6, 0.5, amplitude=2.0)
    p = ExtensionProblem(f, ball(1, 1.2))
    for x in np.linspace(-0.9, 0.9, 5):
        v = poisson_extend(p, [x])
        assert 0.0 <= v <= 2.0


def test_extension_rejects_non_L_alpha_data():
    with pytest.raises(NotInLalphaError):
        ExtensionProblem(Affine([1.0]), ball(1, 0.8))


def test_extension_dimension_mismatch():
    with pytest.raises(DomainError):
        ExtensionProblem(Gaussian([0.0, 0.0]), ball(1, 1.0))


def test_gradient_of_constant_vanishes():
    p = ExtensionProblem(Constant(3.0, 2), ball(2, 1.1))
    for nu in ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0]):
        assert abs(poisson_gradient(p, [0.3, -0.4], nu)) <= 1e-8


def test_gradient_affine():
    p = ExtensionProblem(Affine([0.7], 0.2), ball(1, 1.5))
    assert poisson_gradient(p, [0.3], [1.0]) == pytest.approx(0.7, abs=1e-5)


@pytest.mark.parametrize("x", [0.0, 0.4])
def test_gradient_vs_finite_difference(x):
    p = ExtensionProblem(Gaussian(1.3, 0.8), ball(1, 0.9))
    h = 1e-4
    fd = (poisson_extend(p, [x + h]) - poisson_extend(p, [x - h])) / (2 * h)
    assert poisson_gradient(p, [x], [1.0]) == pytest.approx(fd, rel=1e-4)


def test_gradient_2d_vs_finite_difference():
    p = ExtensionProblem(Gaussian([1.2, 0.5], 0.7), ball(2, 1.2))
    x, nu, h = np.array([0.2, 0.1]), np.array([0.6, 0.8]), 1e-4
    fd = (poisson_extend(p, x + h * nu) - poisson_extend(p, x - h * nu)) / (2 * h)
    assert poisson_gradient(p, x, nu) == pytest.approx(fd, rel=1e-4)


def test_gradient_rejects_zero_direction():
    p = ExtensionProblem(Constant(1.0), ball(1, 1.0))
    with pytest.raises(DomainError):
        poisson_gradient(p, [0.0], [0.0])


def test_reproduction_center():
    r = riesz_reproduction_residual(ball(2, 1.0), [0.0, 0.0], [2.0, 0.0])
    assert abs(r) <= 1e-6 / 2.0


def test_reproduction_far_pole():
    for d in (1e2, 1e4):
        r = riesz_reproduction_residual(ball(2, 1.0), [0.0, 0.0], [0.0, d])
        assert abs(r) <= 1e-6 * d ** -1.0


def test_reproduction_off_center_3d():
    b = ball(3, 0.7)
    x, z = np.array([0.5, 0.0, 0.0]), np.array([0.0, 1.5, 0.0])
    r = riesz_reproduction_residual(b, x, z)
    assert abs(r) <= 1e-6 * np.linalg.norm(z - x) ** (0.7 - 3)


def test_reproduction_needs_n_above_alpha():
    with pytest.raises(UnsupportedRegimeError):
        riesz_reproduction_residual(ball(1, 1.5), [0.0], [2.0])


def test_riesz_data_extension_matches_kernel():
    b = ball(2, 1.0)
    c = constants(b.params).c_riesz
    z = np.array([0.0, 3.0])
    p = ExtensionProblem(RieszKernel(z, 1.0), b)
    x = np.array([0.5, 0.0])
    assert poisson_extend(p, x) == pytest.approx(c * np.linalg.norm(z - x) ** -1.0, rel=1e-6)


def test_mass_warning_triggers_renormalization(monkeypatch):
    import fraclap.poisson as mod

    monkeypatch.setattr(mod, "poisson_mass", lambda *a, **k: 1.01)
    p = ExtensionProblem(Gaussian(1.5, 1.0), ball(1, 1.0))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        v = poisson_extend(p, [0.5])
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)
    assert v == pytest.approx(EXTENSION_ORACLE_1D / 1.01, rel=1e-9)


def test_extended_function_pieces():
    p = ExtensionProblem(Gaussian(1.5, 1.0), ball(1, 1.0))
    F = ExtendedFunction(p)
    assert F([1.5]) == pytest.approx(1.0)
    assert F([0.5]) == pytest.approx(EXTENSION_ORACLE_1D, rel=1e-9)
    assert sorted(float(q[0]) for q in F.singular_points()) == [-1.0, 1.0]


def test_extension_is_alpha_harmonic():
    p = ExtensionProblem(Gaussian(1.5, 1.0), ball(1, 1.0))
    F = ExtendedFunction(p)
    q = pizzetti_quotient(F, [0.3], 0.02, FracParams(1, 1.0))
    assert abs(q) <= 1e-3
