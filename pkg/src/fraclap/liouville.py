"""Numerical harness around the Liouville theorem.

* growth hypotheses of a candidate function (L_alpha tail, sphere liminf of
  u / |x|^gamma at growing radii);
* the exterior radial integral that controls the gradient estimate;
* a 1D Dirichlet solver for (-Laplacian)^(alpha/2) on (-1, 1) whose matrix is
  an M-matrix, so its solutions obey the discrete maximum principle;
* a demo that tracks Poisson-extension gradients over growing balls.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, linalg

from ._parallel import pmap
from .errors import AccuracyError, DivergenceError, DomainError, SolverError
from .functions import FunctionSpec
from .kernels import BallSpec, FracParams, constants
from .quadrature import DEFAULT_CONFIG, integrate_radial, sphere_mean
from .poisson import ExtensionProblem, poisson_gradient

__all__ = [
    "GrowthReport",
    "check_liouville_hypotheses",
    "exterior_radial_integral",
    "DirichletProblem1D",
    "DirichletSolution",
    "solve_dirichlet_1d",
    "LiouvilleReport",
    "liouville_demo",
    "GAMMA_GRID",
    "TOLERANCE_LADDER",
]

GAMMA_GRID = tuple(round(0.1 * k, 1) for k in range(11))
TOLERANCE_LADDER = (1e-2, 1e-3, 1e-4)


def _sphere_samples(n, count=64):
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    # Fibonacci points on S^2
    k = np.arange(4 * count) + 0.5
    z = 1.0 - 2.0 * k / (4 * count)
    phi = np.pi * (1.0 + 5 ** 0.5) * k
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)


@dataclass
class GrowthReport:
    gamma: float
    alpha: float
    gamma_hat: float
    liminf_estimates: list
    tail_integral: float
    in_L_alpha: bool
    admissible: bool
    liminf_ok: bool
    violations: list = field(default_factory=list)

    @property
    def satisfied(self):
        return not self.violations


def _tail_integral(f, params, cfg):
    """int |u(y)| / (1 + |y|^(n+alpha)) dy by radial quadrature; inf if divergent."""
    n, a = params.n, params.alpha
    area = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)

    def absu(y):
        return np.abs(f._eval(y))

    def integrand(rho):
        if rho == 0.0:
            return 0.0
        m = sphere_mean(absu, n, rho, None, cfg, singular_points=f.singular_points())
        return area * rho ** (n - 1) * m / (1.0 + rho ** (n + a))

    try:
        res = integrate_radial(
            integrand,
            0.0,
            math.inf,
            cfg,
            decay_exponent=1.0 + a - max(f.growth, 0.0),
            breakpoints=f.radial_breakpoints(np.zeros(n)),
            scale=f.period,
        )
    except DivergenceError:
        return math.inf
    return res.value


def _sphere_min(f, R, gamma, dirs):
    return float(np.min(f._eval(R * dirs))) / R ** gamma


def _sphere_max_abs(f, R, gamma, dirs):
    return float(np.max(np.abs(f._eval(R * dirs)))) / R ** gamma


def check_liouville_hypotheses(f, params, gamma, radii, *, tol=1e-6, cfg=DEFAULT_CONFIG):
    """Evaluate the growth hypotheses of the Liouville theorem for ``f``.

    The liminf condition is a heuristic on finitely many radii: the sphere
    minima of u / |x|^gamma over the larger half of ``radii`` must stay above
    -tol.  ``gamma_hat`` is the smallest gamma on a 0.1 grid for which that
    holds and the sphere maxima of |u| / |x|^gamma do not grow, i.e. a growth
    exponent estimate; nan when no grid value qualifies.
    """
    if f.n != params.n:
        raise DomainError("function and params dimensions differ")
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be positive and strictly increasing (at least two)")
    dirs = _sphere_samples(params.n)
    late = radii[len(radii) // 2:]

    def liminf_holds(g):
        return min(_sphere_min(f, R, g, dirs) for R in late) >= -tol

    def bounded(g):
        m = [_sphere_max_abs(f, R, g, dirs) for R in late]
        return m[-1] <= m[0] * (1.0 + 1e-9) + tol

    estimates = [(R, _sphere_min(f, R, gamma, dirs)) for R in radii]
    liminf_ok = liminf_holds(gamma)
    gamma_hat = next((g for g in GAMMA_GRID if liminf_holds(g) and bounded(g)), math.nan)
    tail = _tail_integral(f, params, cfg)
    in_l = math.isfinite(tail)
    admissible = 0.0 <= gamma <= 1.0 and gamma < params.alpha

    violations = []
    if not admissible:
        violations.append(f"gamma={gamma} is not admissible (need 0 <= gamma <= 1 and gamma < alpha={params.alpha})")
    if not in_l:
        violations.append(f"u is not in L_alpha for alpha={params.alpha} (tail integral diverges)")
    if not liminf_ok:
        violations.append(f"liminf of u/|x|^{gamma} >= 0 fails (sphere minima drop below -{tol:g})")
    return GrowthReport(gamma, params.alpha, gamma_hat, estimates, tail, in_l, admissible, liminf_ok, violations)


class RadialIntegralResult(dict):
    """``{"value": ..., "diverges": ...}`` with attribute access."""

    __getattr__ = dict.__getitem__


def exterior_radial_integral(gamma, alpha, n, ratio, R=None, *, cfg=DEFAULT_CONFIG):
    """int_1^R s^(gamma+n-1) (s^2 - 1)^(-alpha/2) (s - ratio)^(-n) ds.

    ``R=None`` means R = infinity when the integral converges.  Divergence is
    decided from the increments over [R0, 2 R0] and [2 R0, 4 R0], whose ratio
    tends to 2^(gamma - alpha); the fitted local exponent gamma - alpha is
    compared against zero with a small allowance for the O(1/R0) correction.
    """
    if not 0.0 < alpha < 2.0:
        raise DomainError("alpha must lie in (0, 2)")
    if not 0.0 <= ratio < 1.0:
        raise DomainError(f"ratio must lie in [0, 1), got {ratio!r}")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")

    def integrand(s):
        return s ** (gamma + n - 1.0) * (s * s - 1.0) ** (-alpha / 2.0) * (s - ratio) ** (-n)

    def near(d):
        s = 1.0 + d
        return s ** (gamma + n - 1.0) * (d * (2.0 + d)) ** (-alpha / 2.0) * (s - ratio) ** (-n)

    def finite(a, b):
        if a == 1.0:
            return integrate_radial(
                integrand, 1.0, b, cfg, lower_exponent=alpha / 2.0, near=min(2.0, b), gap_func=near
            ).value
        return integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]

    R0 = 1e4
    d1 = finite(R0, 2 * R0)
    d2 = finite(2 * R0, 4 * R0)
    diverges = bool(math.log2(d2 / d1) > -0.02)

    if R is not None:
        value = finite(1.0, float(R))
    elif diverges:
        value = math.inf
    else:
        value = integrate_radial(
            integrand,
            1.0,
            math.inf,
            cfg,
            lower_exponent=alpha / 2.0,
            decay_exponent=1.0 + alpha - gamma,
            near=2.0,
            gap_func=near,
        ).value
    return RadialIntegralResult(value=value, diverges=diverges)


@dataclass
class DirichletProblem1D:
    """(-Laplacian)^(alpha/2) v = rhs on (-1, 1), v = exterior_data for |x| >= 1."""

    N: int
    exterior_data: FunctionSpec
    alpha: float
    rhs: object = None
    cfg: object = DEFAULT_CONFIG

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 8:
            raise DomainError("grid size N must be an integer >= 8")
        self.N = int(self.N)
        FracParams(1, self.alpha)
        if self.exterior_data.n != 1:
            raise DomainError("exterior data must be a function on R^1")
        if not self.exterior_data.in_L_alpha(self.alpha):
            raise DomainError(f"exterior data is not in L_alpha for alpha={self.alpha}")

    @property
    def h(self):
        return 2.0 / (self.N + 1)

    @property
    def nodes(self):
        return -1.0 + self.h * np.arange(1, self.N + 1)

    def rhs_values(self):
        if self.rhs is None:
            return np.zeros(self.N)
        if callable(self.rhs):
            return np.asarray(self.rhs(self.nodes[:, None]), dtype=float).reshape(self.N)
        v = np.asarray(self.rhs, dtype=float)
        if v.shape == ():
            return np.full(self.N, float(v))
        if v.shape != (self.N,):
            raise DomainError(f"rhs must have one value per interior node ({self.N})")
        return v


@dataclass
class DirichletSolution:
    nodes: np.ndarray
    values: np.ndarray
    exterior_error: float
    boundary_values: tuple

    def __call__(self, x):
        xs = np.concatenate([[-1.0], self.nodes, [1.0]])
        vs = np.concatenate([[self.boundary_values[0]], self.values, [self.boundary_values[1]]])
        return np.interp(x, xs, vs)


def _power_integral(a, b, p):
    """int_a^b t^p dt for 0 < a <= b."""
    if p == -1.0:
        return math.log(b / a)
    return (b ** (p + 1.0) - a ** (p + 1.0)) / (p + 1.0)


@lru_cache(maxsize=32)
def _stiffness(N, alpha):
    """Unnormalized operator matrix over nodes 0..N+1 (rows: interior nodes 1..N).

    Row i represents D_alpha v(x_i) with |z| < h handled by the second
    difference (exact for quadratics) and |z| >= h by exact integrals of the
    hat functions against |z|^(-1-alpha).  Off-diagonal entries are <= 0.
    The data term int_{|y|>1} g(y) |x_i - y|^(-1-alpha) dy goes to the load.
    """
    h = 2.0 / (N + 1)
    a = alpha
    x = -1.0 + h * np.arange(N + 2)
    A = np.zeros((N, N + 2))
    near = h ** (-a) / (2.0 - a)
    far_total = 2.0 * h ** (-a) / a
    for row, i in enumerate(range(1, N + 1)):
        A[row, i] += 2.0 * near + far_total
        A[row, i - 1] -= near
        A[row, i + 1] -= near
        for k in range(N + 1):
            if k in (i - 1, i):
                continue
            left, right = x[k], x[k + 1]
            if right <= x[i]:
                lo, hi, near_node, far_node = x[i] - right, x[i] - left, k + 1, k
            else:
                lo, hi, near_node, far_node = left - x[i], right - x[i], k, k + 1
            i1 = _power_integral(lo, hi, -1.0 - a)
            i0 = _power_integral(lo, hi, -a)
            A[row, near_node] -= (hi * i1 - i0) / h
            A[row, far_node] -= (i0 - lo * i1) / h
    return A


def _exterior_load(g, nodes, alpha, cfg):
    """int_{|y|>1} g(y) |x_i - y|^(-1-alpha) dy for every node, vectorized."""
    a = alpha
    d_right = 1.0 - nodes
    d_left = 1.0 + nodes

    def f(t):
        gr = float(g(np.array([1.0 + t])))
        gl = float(g(np.array([-1.0 - t])))
        return gr * (t + d_right) ** (-1.0 - a) + gl * (t + d_left) ** (-1.0 - a)

    val, err = integrate.quad_vec(f, 0.0, math.inf, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=10000)
    return np.asarray(val), float(err)


def solve_dirichlet_1d(p):
    """Solve the collocated Dirichlet problem; returns interior nodal values."""
    N, a, g = p.N, p.alpha, p.exterior_data
    c = constants(FracParams(1, a)).c_norm
    h = p.h
    nodes = p.nodes
    A = _stiffness(N, a)
    # the diagonal already holds v_i * int_{|z|>=h} |z|^(-1-a) dz, exterior included
    M = A[:, 1:-1]
    gb = (float(g(np.array([-1.0]))), float(g(np.array([1.0]))))
    load, err = _exterior_load(g, nodes, a, p.cfg)
    b = p.rhs_values() / c + load - A[:, 0] * gb[0] - A[:, -1] * gb[1]
    scale = max(1.0, float(np.max(np.abs(load))))
    if err > p.cfg.rel_tol * scale + p.cfg.abs_tol:
        warnings.warn(f"exterior load quadrature error {err:.3g} exceeds tolerance", RuntimeWarning, stacklevel=2)
    try:
        v = linalg.solve(M, b, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"collocation system could not be solved: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise SolverError("collocation system produced non-finite values")
    return DirichletSolution(nodes, v, err, gb)


@dataclass
class LiouvilleReport:
    hypotheses: GrowthReport
    radii: list
    probes: list
    gradient_bounds: list
    gradient_errors: list
    verdicts: dict
    notes: list = field(default_factory=list)


def liouville_demo(f, params, gamma, ball, *, radii=None, probes=None, threads=None):
    """Gradient bounds of the Poisson extension of ``f`` over growing balls.

    For each radius r the largest |d u_hat / d nu| over the probes and the
    coordinate directions is recorded.  For each tolerance in the ladder the
    verdict is "constant-consistent" when the bounds do not increase and the
    bound at the largest radius is below the tolerance.  Hypothesis failures
    are reported in ``notes``, never raised.
    """
    if ball.n != params.n or ball.alpha != params.alpha:
        raise DomainError("ball and params disagree")
    radii = [ball.r * m for m in (1.0, 2.0, 4.0)] if radii is None else [float(r) for r in radii]
    n = params.n
    if probes is None:
        probes = [np.zeros(n), np.r_[0.25 * ball.r, np.zeros(n - 1)]]
    probes = [np.asarray(q, dtype=float).reshape(n) for q in probes]
    if any(np.linalg.norm(q) >= min(radii) for q in probes):
        raise DomainError("probes must lie inside the smallest ball")

    hyp = check_liouville_hypotheses(f, params, gamma, [ball.r * 2.0 ** k for k in range(2, 9)])
    notes = list(hyp.violations)

    def bound(r):
        prob = ExtensionProblem(f, BallSpec(r, params))
        vals, errs = [], []
        for q in probes:
            for e in np.eye(n):
                v, er = poisson_gradient(prob, q, e, full_output=True)
                vals.append(abs(v))
                errs.append(er)
        k = int(np.argmax(vals))
        return vals[k], errs[k]

    out = pmap(bound, radii, threads)
    bounds = [b for b, _ in out]
    errs = [e for _, e in out]
    monotone = all(b2 <= b1 + e1 + e2 + 1e-12 for (b1, e1), (b2, e2) in zip(out, out[1:]))
    verdicts = {}
    for tol in TOLERANCE_LADDER:
        ok = monotone and bounds[-1] <= tol
        verdicts[tol] = "constant-consistent" if ok else "not constant-consistent"
    if not monotone:
        notes.append("gradient bounds increase with r")
    return LiouvilleReport(hyp, radii, [q.tolist() for q in probes], bounds, errs, verdicts, notes)
