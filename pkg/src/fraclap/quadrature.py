"""Singular and improper integration engine.

Everything is built on top of :func:`scipy.integrate.quad` (QUADPACK).  What
lives here is the part QUADPACK does not do for us: changes of variables that
remove algebraic endpoint singularities, segmentation of long radial ranges,
compactification of power-law tails, and angular averaging over spheres.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DivergenceError, DomainError, EvaluationError, NotInLalphaError
from .kernels import sphere_area

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "RadialIntegrand",
    "integrate_radial",
    "integrate_exterior_radial",
    "sphere_kernel_integral",
    "sine_power_integral",
    "sphere_mean",
    "pv_symmetric_quad",
]

# Tail exponents above this are treated as "fast decay"; the compactifying
# substitution then leaves an integrand vanishing at the far end.
_TAIL_EXPONENT_CAP = 3.0
_MAX_CHUNKS = 4000


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    truncation_radius: float = 1e4
    split_radius: float = 1.0
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if not self.truncation_radius > self.split_radius > 0:
            raise DomainError("need truncation_radius > split_radius > 0")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")

    def tightened(self, factor):
        """Copy with both tolerances divided by ``factor``."""
        return QuadratureConfig(
            abs_tol=self.abs_tol / factor,
            rel_tol=self.rel_tol / factor,
            truncation_radius=self.truncation_radius,
            split_radius=self.split_radius,
            max_subdivisions=self.max_subdivisions,
        )


DEFAULT_CONFIG = QuadratureConfig()


class QuadResult(NamedTuple):
    value: float
    error: float
    # contribution of the range beyond the truncation radius, plus its error
    tail: float = 0.0


@dataclass
class RadialIntegrand:
    """Integrand on (1, inf) behaving like (s - 1)^(-endpoint_exponent) near 1
    and like s^(-decay_exponent) at infinity."""

    func: Callable[[float], float]
    endpoint_exponent: float = 0.0
    decay_exponent: float = math.inf
    breakpoints: Sequence[float] = field(default_factory=tuple)
    scale: float | None = None

    def __post_init__(self):
        for s in (1.0 + 1e-6, 1.5, 3.0, 50.0):
            v = self.func(s)
            if not np.isfinite(v):
                raise EvaluationError(f"radial integrand is not finite at probe s={s}: {v!r}")


def _quad(f, a, b, epsabs, epsrel, limit, points=None):
    kw = {}
    if points is not None and len(points):
        kw["points"] = points
    out = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **kw)
    val, err, info = out[0], out[1], out[2]
    ier = 0 if len(out) == 3 else 1
    if not (np.isfinite(val) and np.isfinite(err)):
        # a nan here comes from the integrand, not from QUADPACK
        raise EvaluationError(f"integrand produced a non-finite value on [{a}, {b}]")
    return val, err, ier


def _segments(a, b, breakpoints, scale, geometric=True):
    pts = {a, b}
    pts.update(p for p in breakpoints if a < p < b)
    if geometric and a > 0:
        x = 2.0 * a
        while x < b:
            pts.add(x)
            x *= 2.0
    if scale:
        step = 4.0 * scale
        if (b - a) / step <= _MAX_CHUNKS:
            pts.update(np.arange(a + step, b, step).tolist())
    return sorted(pts)


def integrate_radial(
    func,
    lower,
    upper,
    cfg=DEFAULT_CONFIG,
    *,
    lower_exponent=0.0,
    decay_exponent=math.inf,
    breakpoints=(),
    scale=None,
    near=None,
    truncation=None,
    period=None,
    offset=None,
    gap_func=None,
):
    """Integrate ``func`` over [lower, upper] (``upper`` may be inf).

    ``func`` may behave like (s - lower)^(-lower_exponent) at the lower end;
    the first segment [lower, near] is mapped by s = lower + (near-lower) t^m
    with m = 1/(1 - lower_exponent), which leaves a bounded integrand.  The
    range beyond ``truncation`` is compactified using ``decay_exponent``.

    If the integrand oscillates with a known ``period``, the tail is computed
    from its triangle-window average over two periods plus an exact boundary
    correction, so the compactified part no longer oscillates.  ``offset``
    is an optional pair ``(h, H)`` of a non-oscillating part h of ``func``
    and its exact tail integral H(R) = int_R^inf h; it is removed before the
    averaging and added back in closed form.

    ``gap_func(d)``, if given, must equal ``func(lower + d)``; it is used on
    the mapped segment so that the distance to the singular endpoint is
    never rounded away when lower + d is formed.
    """
    if lower_exponent >= 1.0:
        raise DivergenceError(f"endpoint exponent {lower_exponent} >= 1: integral diverges")
    infinite = math.isinf(upper)
    if infinite and decay_exponent <= 1.0:
        raise DivergenceError(f"decay exponent {decay_exponent} <= 1: integral diverges at infinity")

    bps = sorted(float(p) for p in breakpoints if lower < p < upper)
    if near is None:
        near = lower + (1.0 if lower == 0 else lower)
    near = min(near, upper)
    if bps and bps[0] < near:
        near = bps[0]

    limit = int(cfg.max_subdivisions)
    pieces = []

    m = 1.0 / (1.0 - lower_exponent)
    width = near - lower

    def mapped(t):
        if t <= 0.0:
            return 0.0
        d = width * t ** m
        v = gap_func(d) if gap_func is not None else func(lower + d)
        return v * width * m * t ** (m - 1.0)

    pieces.append(_quad(mapped, 0.0, 1.0, cfg.abs_tol, cfg.rel_tol, limit) + ("near",))

    if infinite:
        R = truncation if truncation is not None else cfg.truncation_radius
        if period:
            R = min(R, 64.0 * period)
        R = max(R, 4.0 * near, 2.0 * (bps[-1] if bps else 0.0))
    else:
        R = upper
    if R > near:
        segs = _segments(near, R, bps, scale)
        eps = cfg.abs_tol / max(len(segs) - 1, 1)
        for a, b in zip(segs[:-1], segs[1:]):
            pieces.append(_quad(func, a, b, eps, cfg.rel_tol, limit) + ("mid",))

    tail_val = tail_err = 0.0
    if infinite and period:
        tail_val, tail_err = _periodic_tail(func, R, period, offset, decay_exponent, cfg, limit, pieces)
    elif infinite:
        p = min(decay_exponent, _TAIL_EXPONENT_CAP)
        q = 1.0 / (p - 1.0)

        def compact(w):
            if w <= 0.0:
                return 0.0
            s = R * w ** (-q)
            if not math.isfinite(s):
                return 0.0
            v = func(s)
            if v == 0.0:
                return 0.0
            # for small decay exponents the Jacobian overflows while func(s)
            # underflows, so the product is formed in log space
            return math.copysign(math.exp(math.log(abs(v)) + math.log(R * q) - (q + 1.0) * math.log(w)), v)

        tail_val, tail_err, ier = _quad(compact, 0.0, 1.0, cfg.abs_tol, cfg.rel_tol, limit)
        pieces.append((tail_val, tail_err, ier, "tail"))

    value = math.fsum(p[0] for p in pieces)
    error = math.fsum(p[1] for p in pieces)
    scale_sum = math.fsum(abs(p[0]) for p in pieces)
    if any(p[2] for p in pieces) and error > max(cfg.abs_tol, cfg.rel_tol * scale_sum):
        raise AccuracyError(
            f"radial quadrature did not converge (estimate {value!r}, error {error:.3g})",
            estimate=value,
            error=error,
        )
    return QuadResult(value, error, abs(tail_val) + tail_err)


_WIN_NODES, _WIN_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _window_average(func, P):
    """Triangle-window average over [s, s + 2P] and its boundary terms.

    With k the triangle density on [0, 2P] and K its distribution function,
    int_R^inf g = int_R^inf (g*k) + int_R^(R+2P) g(t) (1 - K(t - R)) dt.
    """
    t = 0.5 * P * (_WIN_NODES + 1.0)
    wt = 0.5 * P * _WIN_WEIGHTS
    rise = t / (P * P)
    fall = (P - t) / (P * P)

    def averaged(s):
        up = sum(w * k * func(s + x) for x, w, k in zip(t, wt, rise))
        down = sum(w * k * func(s + P + x) for x, w, k in zip(t, wt, fall))
        return up + down

    def edge(R):
        def first(x):
            u = x - R
            return func(x) * (1.0 - u * u / (2.0 * P * P))

        def second(x):
            u = 2.0 * P - (x - R)
            return func(x) * (u * u / (2.0 * P * P))

        return [(R, R + P, first), (R + P, R + 2.0 * P, second)]

    return averaged, edge


# the window average loses accuracy once s + P is no longer resolved in
# double precision; beyond this multiple of R the averaged tail is cut off
_PERIODIC_TAIL_SPAN = 1e6


def _periodic_tail(func, R, period, offset, decay_exponent, cfg, limit, pieces):
    h, H = offset if offset is not None else (None, None)
    osc = func if h is None else (lambda s: func(s) - h(s))
    averaged, edge = _window_average(osc, period)
    for a, b, w in edge(R):
        pieces.append(_quad(w, a, b, 0.5 * cfg.abs_tol, cfg.rel_tol, limit) + ("edge",))

    # log map s = R e^t over [R, R * span]
    t_max = math.log(_PERIODIC_TAIL_SPAN)

    def logged(t):
        s = R * math.exp(t)
        return averaged(s) * s

    val, err, ier = _quad(logged, 0.0, t_max, cfg.abs_tol, cfg.rel_tol, limit)
    s_cut = R * _PERIODIC_TAIL_SPAN
    # neglected remainder, bounded by the envelope at the cut-off
    p = max(decay_exponent, 1.0 + 1e-3)
    err += abs(averaged(s_cut)) * s_cut / (p - 1.0)
    pieces.append((val, err, ier, "tail"))
    if H is not None:
        pieces.append((H(R), 0.0, 0, "offset"))
        val += H(R)
    return val, err


def integrate_exterior_radial(f, cfg=DEFAULT_CONFIG):
    """Integrate a :class:`RadialIntegrand` over (1, inf)."""
    return integrate_radial(
        f.func,
        1.0,
        math.inf,
        cfg,
        lower_exponent=f.endpoint_exponent,
        decay_exponent=f.decay_exponent,
        breakpoints=f.breakpoints,
        scale=f.scale,
        near=2.0,
    )


def sine_power_integral(k):
    """Integral of sin^k over [0, pi]."""
    return math.sqrt(math.pi) * math.gamma((k + 1) / 2.0) / math.gamma(k / 2.0 + 1.0)


def sphere_kernel_integral(q, n):
    """Angular integral of sin^(n-2)(theta) (q^2 - 2 q cos(theta) + 1)^(-n/2) over [0, pi].

    Uses the closed form (int_0^pi sin^(n-2)) / (q^(n-2) (q^2 - 1)) valid for q > 1.
    """
    if n < 2:
        raise DomainError("sphere_kernel_integral needs n >= 2")
    if not q > 1.0:
        raise DomainError(f"sphere_kernel_integral needs q > 1, got {q!r}")
    return sine_power_integral(n - 2) / (q ** (n - 2) * (q * q - 1.0))


# product rule on S^2: Gauss-Legendre in cos(theta) times trapezoid in phi
_S2_NODES = 48


def _s2_rule(m=_S2_NODES):
    mu, wmu = np.polynomial.legendre.leggauss(m)
    phi = np.arange(2 * m) * (np.pi / m)
    st = np.sqrt(1.0 - mu * mu)
    dirs = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(mu, 2 * m),
        ],
        axis=-1,
    )
    w = np.repeat(wmu, 2 * m) * (np.pi / m) / (4.0 * np.pi)
    return dirs, w


_S2_DIRS, _S2_WEIGHTS = _s2_rule()


def _rotation_to(axis):
    """Orthogonal matrix mapping e_3 onto the unit vector ``axis``."""
    axis = axis / np.linalg.norm(axis)
    e3 = np.array([0.0, 0.0, 1.0])
    v = np.cross(e3, axis)
    c = float(axis @ e3)
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


# azimuthal nodes of the adaptive S^2 rule; the trapezoid rule is spectrally
# accurate for the smooth periodic ring integrands left once the pole sits on
# the singular point
_S2_AZIMUTH = 128


def _s2_adaptive_mean(func, rho, center, cfg, singular_points, axis):
    """Adaptive polar angle times periodic trapezoid azimuth on S^2.

    The pole is put on the first singular point (or along ``axis``), so the
    only non-smooth behaviour left is at theta = 0 or at the polar breakpoints.
    """
    pole = None
    for p in singular_points:
        d = np.asarray(p, dtype=float).reshape(3) - center
        if np.linalg.norm(d) > 0:
            pole = d
            break
    if pole is None and axis is not None and np.linalg.norm(axis) > 0:
        pole = np.asarray(axis, dtype=float)
    R = np.eye(3) if pole is None else _rotation_to(pole)
    th_pts = set()
    for p in singular_points:
        d = R.T @ (np.asarray(p, dtype=float).reshape(3) - center)
        nd = np.linalg.norm(d)
        if nd > 0:
            th_pts.add(math.acos(max(-1.0, min(1.0, d[2] / nd))))
    if axis is not None and np.linalg.norm(axis) > 0:
        a = R.T @ np.asarray(axis, dtype=float)
        th_pts.add(math.acos(max(-1.0, min(1.0, a[2] / np.linalg.norm(a)))))
    th_pts = sorted(b for b in th_pts if 1e-12 < b < math.pi - 1e-12)
    phi = np.arange(_S2_AZIMUTH) * (2.0 * math.pi / _S2_AZIMUTH)
    cp, sp = np.cos(phi), np.sin(phi)

    def ring(theta):
        st, ct = math.sin(theta), math.cos(theta)
        local = np.stack([st * cp, st * sp, np.full_like(cp, ct)], axis=-1)
        vals = func(center + rho * (local @ R.T))
        return float(np.mean(vals)) * st

    val = _quad(ring, 0.0, math.pi, cfg.abs_tol * 0.1, cfg.rel_tol * 0.1, 10 * cfg.max_subdivisions, th_pts or None)[0]
    return 0.5 * val


def sphere_mean(
    func, n, rho, center=None, cfg=DEFAULT_CONFIG, *, singular_points=(), axis=None, adaptive=False
):
    """Average of ``func`` over the sphere of radius ``rho`` about ``center``.

    ``func`` maps an array of points (..., n) to values.  For n = 2 the angle is
    integrated adaptively with breakpoints at the directions of
    ``singular_points``; for n = 3 a fixed 48 x 96 product rule is used, rotated
    so that its pole points along ``axis`` (where the integrand peaks), unless
    ``adaptive`` asks for an adaptive polar angle with a trapezoid azimuth.
    """
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float).reshape(n)
    if n == 1:
        pts = np.array([[center[0] + rho], [center[0] - rho]])
        v = func(pts)
        return 0.5 * (v[0] + v[1])
    if n == 2:
        phi0 = 0.0
        if axis is not None and np.linalg.norm(axis) > 0:
            phi0 = math.atan2(axis[1], axis[0])
        brk = []
        for p in singular_points:
            d = np.asarray(p, dtype=float) - center
            if np.linalg.norm(d) > 0:
                ang = (math.atan2(d[1], d[0]) - (phi0 - math.pi)) % (2 * math.pi) + (phi0 - math.pi)
                brk.append(ang)
        if axis is not None:
            brk.append(phi0)

        def f(phi):
            return float(func(center + rho * np.array([math.cos(phi), math.sin(phi)])))

        lo, hi = phi0 - math.pi, phi0 + math.pi
        brk = sorted(b for b in brk if lo < b < hi)
        val, _, _ = _quad(f, lo, hi, cfg.abs_tol * 0.1, cfg.rel_tol * 0.1, 10 * cfg.max_subdivisions, brk or None)
        return val / (2.0 * math.pi)
    if n == 3 and adaptive:
        return _s2_adaptive_mean(func, rho, center, cfg, singular_points, axis)
    if n == 3:
        dirs = _S2_DIRS
        if axis is not None and np.linalg.norm(axis) > 0:
            dirs = dirs @ _rotation_to(np.asarray(axis, dtype=float)).T
        return float(np.dot(_S2_WEIGHTS, func(center + rho * dirs)))
    raise DomainError("angular quadrature is supported for n <= 3 only")


def pv_symmetric_quad(g, params, cfg=DEFAULT_CONFIG, *, radial_mean=None, growth=0.0, breakpoints=(), scale=None, period=None, mean_offset=None):
    """Integral of the even second difference g(z) against |z|^(-n-alpha).

    ``g(z) = u(x+z) + u(x-z) - 2u(x)`` is passed as a vectorized callable of
    z with shape (..., n).  Alternatively ``radial_mean(rho)`` may supply the
    sphere average of g directly (then ``g`` is ignored).  The near range
    [0, split_radius] relies on the O(|z|^2) cancellation of g; the far range
    uses the declared ``growth`` of g to compactify the tail.  For oscillating
    g, ``period`` and the constant ``mean_offset`` (the non-oscillating far-field
    level of the radial mean, typically -2u(x)) enable the averaged tail.
    """
    n, a = params.n, params.alpha
    if growth >= a:
        raise NotInLalphaError(f"growth exponent {growth} >= alpha={a}: principal value diverges")
    if radial_mean is None:

        def radial_mean(rho):
            return sphere_mean(g, n, rho, cfg=cfg)

    def integrand(rho):
        return radial_mean(rho) * rho ** (-1.0 - a)

    res = integrate_radial(
        integrand,
        0.0,
        math.inf,
        cfg,
        # |g| ~ rho^2 at the origin, so the integrand behaves like rho^(1 - alpha)
        lower_exponent=a - 1.0,
        decay_exponent=1.0 + a - max(growth, 0.0),
        breakpoints=breakpoints,
        scale=scale,
        near=cfg.split_radius,
        period=period,
        offset=None if mean_offset is None else (
            lambda rho: mean_offset * rho ** (-1.0 - a),
            lambda R: mean_offset * R ** (-a) / a,
        ),
    )
    area = sphere_area(n)
    return QuadResult(area * res.value, area * res.error, area * res.tail)


def hyp_minus_one(terms, w, closed):
    """Evaluate F(w) - 1 for a hypergeometric series without cancellation.

    ``terms(k)`` returns the ratio of consecutive series coefficients
    t_{k+1}/t_k (with t_0 = 1); the series is summed directly for |w| < 0.25,
    otherwise ``closed(w) - 1`` is returned.
    """
    if abs(w) >= 0.25:
        return closed(w) - 1.0
    total, t, k = 0.0, 1.0, 0
    while True:
        t *= terms(k) * w
        total += t
        k += 1
        if abs(t) <= 1e-18 * max(abs(total), 1e-300) or k > 200:
            return total


def hyp0f1_minus_one(b, w):
    return hyp_minus_one(lambda k: 1.0 / ((b + k) * (k + 1)), w, lambda v: float(special.hyp0f1(b, v)))


def hyp2f1_minus_one(a, b, c, w):
    return hyp_minus_one(
        lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)), w, lambda v: float(special.hyp2f1(a, b, c, v))
    )
