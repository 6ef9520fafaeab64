"""Poisson extension from the exterior of a ball.

For data u given on |y| > r the extension is

    u_hat(x) = int_{|y|>r} P_r(y, x) u(y) dy,     |x| < r,

and u_hat = u outside the ball.  Every integral here is reduced to a radial
integral over |y| = r s, s > 1, whose (s^2 - 1)^(-alpha/2) endpoint
singularity is removed by the quadrature module's desingularizing map, and an
angular integral over the sphere |y| = r s.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NotInLalphaError, UnsupportedRegimeError
from .functions import Constant, FunctionSpec, RieszKernel
from .kernels import BallSpec, FracParams, constants, sphere_area
from .operators import alpha_average
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_radial, sphere_mean

__all__ = [
    "ExtensionProblem",
    "poisson_extend",
    "poisson_mass",
    "poisson_gradient",
    "riesz_reproduction_residual",
    "ExtendedFunction",
]

# deviation of the numerical kernel mass from 1 that triggers renormalization
MASS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ExtensionProblem:
    exterior_data: FunctionSpec
    ball: BallSpec
    cfg: QuadratureConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if self.exterior_data.n != self.ball.n:
            raise DomainError("exterior data and ball live in different dimensions")
        if not self.exterior_data.in_L_alpha(self.ball.alpha):
            raise NotInLalphaError(
                f"exterior data grows like |y|^{self.exterior_data.growth}; "
                f"not in L_alpha for alpha={self.ball.alpha}"
            )


def _interior_point(x, ball):
    x = np.asarray(x, dtype=float).reshape(ball.n)
    if not np.linalg.norm(x) < ball.r:
        raise DomainError(f"point {x.tolist()} is not inside the ball of radius {ball.r}")
    return x


def _radial(ball, x, shell, cfg, *, growth, extra_decay=0.0, breakpoints=(), scale=None):
    """c (r^2 - |x|^2)^(a/2) r^(1-a) int_1^inf (s^2 - 1)^(-a/2) shell(r s) ds.

    ``shell(rho)`` is an integral over the sphere |y| = rho that carries the
    |x - y|^(-n) factor of the kernel, so it decays like rho^(growth - 1).
    """
    a, r = ball.alpha, ball.r
    c = constants(ball.params).c_pizzetti
    pref = c * (r * r - float(np.dot(x, x))) ** (a / 2.0) * r ** (1.0 - a)

    def integrand(s):
        return (s * s - 1.0) ** (-a / 2.0) * shell(r * s)

    def near(d):
        return (d * (2.0 + d)) ** (-a / 2.0) * shell(r * (1.0 + d))

    res = integrate_radial(
        integrand,
        1.0,
        math.inf,
        cfg,
        lower_exponent=a / 2.0,
        decay_exponent=1.0 + a + extra_decay - max(growth, 0.0),
        breakpoints=[b / r for b in breakpoints],
        scale=scale / r if scale else None,
        near=2.0,
        truncation=max(cfg.truncation_radius / r, 4.0),
        gap_func=near,
    )
    return pref * res.value, abs(pref) * res.error


def _shell_integral(g, n, rho, x, cfg, singular_points):
    """int_{|y| = rho} g(y) dsigma(y), resolved around the kernel peak at x."""
    m = sphere_mean(
        g, n, rho, None, cfg, singular_points=singular_points, axis=x if np.any(x) else None, adaptive=True
    )
    return sphere_area(n) * rho ** (n - 1) * m


def _data_breakpoints(u):
    return u.radial_breakpoints(np.zeros(u.n))


def poisson_mass(ball, x, cfg=DEFAULT_CONFIG, *, full_output=False):
    """Mass of P_r(., x); equals 1 analytically."""
    x = _interior_point(x, ball)
    n = ball.n
    x2 = float(np.dot(x, x))
    area = sphere_area(n)

    # closed-form angular integral of |x - y|^(-n) over |y| = rho
    def shell(rho):
        return area * rho / (rho * rho - x2)

    val, err = _radial(ball, x, shell, cfg, growth=0.0)
    return (val, err) if full_output else val


def poisson_extend(p, x, *, full_output=False):
    """Value of the extension at ``x`` (data value itself when |x| >= r)."""
    u, ball, cfg = p.exterior_data, p.ball, p.cfg
    x = np.asarray(x, dtype=float).reshape(ball.n)
    if np.linalg.norm(x) >= ball.r:
        val = float(u(x))
        return (val, 0.0) if full_output else val

    if isinstance(u, Constant):
        m, e = poisson_mass(ball, x, cfg, full_output=True)
        val, err = u.value * m, abs(u.value) * e
    elif not np.any(x):
        # at the center P_r(., 0) is the averaging kernel
        val, err = alpha_average(u, x, ball.r, ball.params, cfg, full_output=True)
    else:
        n = ball.n

        def g(y):
            d = np.sqrt(np.sum((y - x) ** 2, axis=-1))
            return u._eval(y) * d ** (-n)

        def shell(rho):
            return _shell_integral(g, n, rho, x, cfg, u.singular_points())

        val, err = _radial(
            ball, x, shell, cfg, growth=u.growth, breakpoints=_data_breakpoints(u), scale=u.period
        )
        mass = poisson_mass(ball, x, cfg)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            warnings.warn(
                f"numerical Poisson kernel mass {mass!r} deviates from 1 at x={x.tolist()}; renormalizing",
                RuntimeWarning,
                stacklevel=2,
            )
            val, err = val / mass, err / mass
    return (val, err) if full_output else val


def poisson_gradient(p, x, direction, *, full_output=False):
    """Directional derivative of the extension at an interior point.

    Uses the kernel derivative
    d/dnu P_r(y, x) = -P_r(y, x) [a (x.nu)/(r^2 - |x|^2) + n ((x - y).nu)/|x - y|^2].
    """
    u, ball, cfg = p.exterior_data, p.ball, p.cfg
    x = _interior_point(x, ball)
    nu = np.asarray(direction, dtype=float).reshape(ball.n)
    norm = np.linalg.norm(nu)
    if not norm > 0:
        raise DomainError("direction must be a nonzero vector")
    nu = nu / norm
    n, a, r = ball.n, ball.alpha, ball.r

    first = first_err = 0.0
    xn = float(np.dot(x, nu))
    if xn != 0.0:
        uh, uh_err = poisson_extend(p, x, full_output=True)
        k = a * xn / (r * r - float(np.dot(x, x)))
        first, first_err = -k * uh, abs(k) * uh_err

    def g(y):
        diff = x - y
        d2 = np.sum(diff * diff, axis=-1)
        return u._eval(y) * (diff @ nu) * d2 ** (-(n + 2) / 2.0)

    def shell(rho):
        return _shell_integral(g, n, rho, x, cfg, u.singular_points())

    second, second_err = _radial(
        ball,
        x,
        shell,
        cfg,
        growth=u.growth,
        extra_decay=1.0,
        breakpoints=_data_breakpoints(u),
        scale=u.period,
    )
    val = first - n * second
    err = first_err + n * second_err
    return (val, err) if full_output else val


def riesz_reproduction_residual(ball, x, z, cfg=DEFAULT_CONFIG):
    """|z - x|^(a-n) minus the Poisson extension of |z - .|^(a-n), for |x| < r < |z|."""
    n, a = ball.n, ball.alpha
    c = constants(ball.params).c_riesz
    if c is None:
        raise UnsupportedRegimeError(f"reproduction identity needs n > alpha (n={n}, alpha={a})")
    x = _interior_point(x, ball)
    z = np.asarray(z, dtype=float).reshape(n)
    if not np.linalg.norm(z) > ball.r:
        raise DomainError("pole z must lie outside the ball")
    data = RieszKernel(z, a, weight=1.0 / c)
    ext = poisson_extend(ExtensionProblem(data, ball, cfg), x)
    return float(np.linalg.norm(z - x)) ** (a - n) - ext


class ExtendedFunction(FunctionSpec):
    """The pieced function: Poisson extension inside the ball, data outside."""

    kind = "poisson_extension"
    smoothness = "C_inf inside the ball, data outside"

    def __init__(self, problem):
        self.problem = problem
        self.n = problem.ball.n

        @lru_cache(maxsize=65536)
        def inner(key):
            return poisson_extend(problem, np.array(key))

        self._inner = inner

    @property
    def growth(self):
        return self.problem.exterior_data.growth

    @property
    def scale(self):
        return self.problem.exterior_data.scale

    def singular_points(self):
        pts = list(self.problem.exterior_data.singular_points())
        if self.n == 1:
            r = self.problem.ball.r
            pts += [np.array([r]), np.array([-r])]
        return pts

    def is_smooth_at(self, x):
        x = np.asarray(x, dtype=float).reshape(self.n)
        return np.linalg.norm(x) < self.problem.ball.r and self.problem.exterior_data.is_smooth_at(x)

    def radial_breakpoints(self, x):
        x = np.asarray(x, dtype=float).reshape(self.n)
        r, d = self.problem.ball.r, float(np.linalg.norm(x))
        pts = set(self.problem.exterior_data.radial_breakpoints(x))
        pts.update(b for b in (r - d, r + d) if b > 0)
        return sorted(pts)

    def _eval(self, y):
        y = np.asarray(y, dtype=float)
        flat = y.reshape(-1, self.n)
        inside = np.linalg.norm(flat, axis=-1) < self.problem.ball.r
        out = np.empty(len(flat))
        if np.any(~inside):
            out[~inside] = self.problem.exterior_data._eval(flat[~inside])
        for i in np.flatnonzero(inside):
            out[i] = self._inner(tuple(flat[i].tolist()))
        return out.reshape(y.shape[:-1])

    def params(self):
        return {
            "exterior_data": self.problem.exterior_data.to_dict(),
            "r": self.problem.ball.r,
            "alpha": self.problem.ball.alpha,
        }
