"""Test-function specifications with known analytic structure.

A :class:`FunctionSpec` is a vectorized callable together with the facts the
numerical routines need: its growth exponent at infinity (which decides
membership in L_alpha and the tail exponent of every integral), its singular
points (which become quadrature breakpoints) and, where a closed form exists,
cancellation-free sphere averages and second differences.
"""

import csv
import math
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DomainError, UnsupportedRegimeError
from .kernels import FracParams, as_points, constants
from .quadrature import DEFAULT_CONFIG, hyp0f1_minus_one, hyp2f1_minus_one, sphere_mean

__all__ = [
    "FunctionSpec",
    "Constant",
    "Affine",
    "Gaussian",
    "Cosine",
    "Power",
    "RieszKernel",
    "Samples",
    "Sum",
    "KINDS",
]


def _norm(y):
    return np.sqrt(np.sum(y * y, axis=-1))


def _scalar(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


class FunctionSpec:
    """Base class.  Subclasses set ``kind``, ``n`` and implement ``_eval``."""

    kind = None
    n = 1
    smoothness = "C_inf"

    def __call__(self, y):
        return _scalar(self._eval(as_points(y, self.n)))

    def _eval(self, y):
        raise NotImplementedError

    # growth exponent g: |u(y)| = O(|y|^g); -inf for super-polynomial decay
    @property
    def growth(self):
        return 0.0

    @property
    def decay_exponent(self):
        return -self.growth

    def in_L_alpha(self, alpha):
        return self.growth < alpha

    def singular_points(self):
        return []

    @property
    def scale(self):
        """Characteristic feature length (oscillation period, width), or None."""
        return None

    @property
    def period(self):
        """Asymptotic oscillation period of the sphere means, or None."""
        return None

    def is_smooth_at(self, x):
        x = np.asarray(x, dtype=float).reshape(self.n)
        return all(np.linalg.norm(x - p) > 0 for p in self.singular_points())

    def radial_breakpoints(self, x):
        """Radii at which spheres about ``x`` meet a singularity of u."""
        x = np.asarray(x, dtype=float).reshape(self.n)
        ds = {float(np.linalg.norm(np.reshape(p, self.n) - x)) for p in self.singular_points()}
        return sorted(d for d in ds if d > 0)

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        """Sphere average of u over |y - x| = rho, minus u(x)."""
        x = np.asarray(x, dtype=float).reshape(self.n)
        m = sphere_mean(self._eval, self.n, rho, x, cfg, singular_points=self.singular_points())
        return m - float(self._eval(x[np.newaxis])[0])

    def sphere_average(self, x, rho, cfg=DEFAULT_CONFIG):
        return self.deviation(x, rho, cfg) + self(np.asarray(x, dtype=float).reshape(self.n))

    def second_difference(self, x, z):
        """u(x + z) + u(x - z) - 2 u(x), vectorized over z."""
        x = np.asarray(x, dtype=float).reshape(self.n)
        z = as_points(z, self.n)
        ux = self._eval(x[np.newaxis])[0]
        return _scalar(self._eval(x + z) + self._eval(x - z) - 2.0 * ux)

    def shifted(self, h):
        """The function y -> u(y - h)."""
        raise UnsupportedRegimeError(f"{self.kind} spec does not support shifting")

    def scaled(self, lam):
        """The function y -> u(lam * y)."""
        raise UnsupportedRegimeError(f"{self.kind} spec does not support scaling")

    def params(self):
        raise NotImplementedError

    def to_dict(self):
        return {"kind": self.kind, "params": self.params(), "decay_exponent": self.decay_exponent}

    def __add__(self, other):
        return Sum([self, other])

    def __rmul__(self, c):
        return Sum([self], [float(c)])

    def __repr__(self):
        return f"{type(self).__name__}({self.params()!r})"

    @staticmethod
    def from_dict(spec, base_dir=None):
        """Build a spec from its JSON form ``{"kind", "params", "decay_exponent"}``."""
        if not isinstance(spec, dict):
            raise DomainError("function spec must be a JSON object")
        kind = spec.get("kind")
        if kind not in KINDS:
            raise DomainError(f"field 'kind': unknown kind {kind!r}; expected one of {sorted(KINDS)}")
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise DomainError("field 'params' must be an object")
        try:
            f = KINDS[kind]._from_params(params, spec, base_dir)
        except (TypeError, KeyError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"field 'params' for kind {kind!r}: {exc}") from exc
        declared = spec.get("decay_exponent")
        if declared is not None and kind != "samples":
            if not (declared == f.decay_exponent or abs(float(declared) - f.decay_exponent) < 1e-12):
                raise DomainError(
                    f"field 'decay_exponent': declared {declared} but kind {kind!r} has {f.decay_exponent}"
                )
        return f


class Constant(FunctionSpec):
    kind = "constant"

    def __init__(self, value=1.0, n=1):
        self.value = float(value)
        self.n = int(n)

    def _eval(self, y):
        return np.full(y.shape[:-1], self.value)

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        return 0.0

    def second_difference(self, x, z):
        return _scalar(np.zeros(as_points(z, self.n).shape[:-1]))

    def shifted(self, h):
        return self

    def scaled(self, lam):
        return self

    def params(self):
        return {"value": self.value, "n": self.n}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p.get("value", 1.0), p.get("n", 1))


class Affine(FunctionSpec):
    kind = "affine"

    def __init__(self, coef, intercept=0.0):
        self.coef = np.atleast_1d(np.asarray(coef, dtype=float))
        self.intercept = float(intercept)
        self.n = self.coef.size

    @property
    def growth(self):
        return 1.0 if np.any(self.coef != 0) else 0.0

    def _eval(self, y):
        return y @ self.coef + self.intercept

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        return 0.0

    def second_difference(self, x, z):
        return _scalar(np.zeros(as_points(z, self.n).shape[:-1]))

    def shifted(self, h):
        return Affine(self.coef, self.intercept - float(self.coef @ np.reshape(h, self.n)))

    def scaled(self, lam):
        return Affine(lam * self.coef, self.intercept)

    def params(self):
        return {"coef": self.coef.tolist(), "intercept": self.intercept}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p["coef"], p.get("intercept", 0.0))


class Gaussian(FunctionSpec):
    """amplitude * exp(-|y - center|^2 / (2 sigma^2))."""

    kind = "gaussian"

    def __init__(self, center=0.0, sigma=1.0, amplitude=1.0, n=None):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if n is not None and c.size == 1 and n > 1:
            c = np.full(n, c[0])
        self.center = c
        self.n = c.size
        self.sigma = float(sigma)
        self.amplitude = float(amplitude)
        if not self.sigma > 0:
            raise DomainError("field 'sigma' must be positive")

    @property
    def growth(self):
        return -math.inf

    @property
    def scale(self):
        return self.sigma

    def _eval(self, y):
        d2 = np.sum((y - self.center) ** 2, axis=-1)
        return self.amplitude * np.exp(-d2 / (2.0 * self.sigma ** 2))

    def radial_breakpoints(self, x):
        # spheres about x that cross the bulk of the bump
        d = float(np.linalg.norm(np.asarray(x, dtype=float).reshape(self.n) - self.center))
        return sorted(b for b in (d - 4.0 * self.sigma, d, d + 4.0 * self.sigma) if b > 0)

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        x = np.asarray(x, dtype=float).reshape(self.n)
        s2 = self.sigma ** 2
        d = float(np.linalg.norm(x - self.center))
        t = rho * d / s2
        b = self.n / 2.0
        ux = self.amplitude * math.exp(-d * d / (2 * s2))
        if t < 1.0:
            mm1 = hyp0f1_minus_one(b, t * t / 4.0)
            return ux * (math.expm1(-rho * rho / (2 * s2)) * (1.0 + mm1) + mm1)
        if rho - d > 40.0 * self.sigma:
            # the whole sphere lies where the bump is below exp(-800)
            return -ux
        # log-domain evaluation of exp(-(d^2 + rho^2)/2s^2) 0F1(; b; t^2/4)
        mean = (
            self.amplitude
            * math.exp(-((rho - d) ** 2) / (2 * s2))
            * math.gamma(b)
            * (t / 2.0) ** (1.0 - b)
            * float(special.ive(b - 1.0, t))
        )
        return mean - ux

    def second_difference(self, x, z):
        x = np.asarray(x, dtype=float).reshape(self.n)
        z = as_points(z, self.n)
        s2 = self.sigma ** 2
        xc = x - self.center
        ux = self.amplitude * math.exp(-float(xc @ xc) / (2 * s2))
        zz = np.sum(z * z, axis=-1) / (2 * s2)
        xz = (z @ xc) / s2
        # 2 u(x) [exp(-|z|^2/2s^2) cosh(x.z/s^2) - 1] without cancellation
        coshm1 = 2.0 * np.sinh(xz / 2.0) ** 2
        return _scalar(2.0 * ux * (np.expm1(-zz) * (1.0 + coshm1) + coshm1))

    def shifted(self, h):
        return Gaussian(self.center + np.reshape(h, self.n), self.sigma, self.amplitude)

    def scaled(self, lam):
        return Gaussian(self.center / lam, self.sigma / lam, self.amplitude)

    def params(self):
        return {"center": self.center.tolist(), "sigma": self.sigma, "amplitude": self.amplitude}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p.get("center", 0.0), p.get("sigma", 1.0), p.get("amplitude", 1.0), p.get("n"))


class Cosine(FunctionSpec):
    """amplitude * cos(k . y + phase)."""

    kind = "cosine"

    def __init__(self, k=1.0, phase=0.0, amplitude=1.0):
        self.k = np.atleast_1d(np.asarray(k, dtype=float))
        self.n = self.k.size
        self.phase = float(phase)
        self.amplitude = float(amplitude)

    @property
    def scale(self):
        kn = float(np.linalg.norm(self.k))
        return 2.0 * math.pi / kn if kn > 0 else None

    @property
    def period(self):
        return self.scale

    def _eval(self, y):
        return self.amplitude * np.cos(y @ self.k + self.phase)

    def _lambda_minus_one(self, rho):
        t = float(np.linalg.norm(self.k)) * rho
        if self.n == 1:
            return -2.0 * math.sin(t / 2.0) ** 2
        return hyp0f1_minus_one(self.n / 2.0, -t * t / 4.0)

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        x = np.asarray(x, dtype=float).reshape(self.n)
        return self.amplitude * math.cos(float(self.k @ x) + self.phase) * self._lambda_minus_one(rho)

    def second_difference(self, x, z):
        x = np.asarray(x, dtype=float).reshape(self.n)
        z = as_points(z, self.n)
        c = self.amplitude * math.cos(float(self.k @ x) + self.phase)
        return _scalar(-4.0 * c * np.sin((z @ self.k) / 2.0) ** 2)

    def shifted(self, h):
        return Cosine(self.k, self.phase - float(self.k @ np.reshape(h, self.n)), self.amplitude)

    def scaled(self, lam):
        return Cosine(lam * self.k, self.phase, self.amplitude)

    def params(self):
        return {"k": self.k.tolist(), "phase": self.phase, "amplitude": self.amplitude}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p.get("k", 1.0), p.get("phase", 0.0), p.get("amplitude", 1.0))


def _power_sphere_mean(d, rho, lam, n):
    """Average of |y|^(-lam) over the sphere |y - x| = rho with |x| = d."""
    big, small = max(d, rho), min(d, rho)
    w = (small / big) ** 2
    return big ** (-lam) * float(special.hyp2f1(lam / 2.0, lam / 2.0 - n / 2.0 + 1.0, n / 2.0, w))


def _power_deviation(d, rho, lam, n):
    """Average of |y|^(-lam) over |y - x| = rho minus |x|^(-lam), |x| = d > 0."""
    if rho < d:
        w = (rho / d) ** 2
        return d ** (-lam) * hyp2f1_minus_one(lam / 2.0, lam / 2.0 - n / 2.0 + 1.0, n / 2.0, w)
    return _power_sphere_mean(d, rho, lam, n) - d ** (-lam)


class Power(FunctionSpec):
    """coefficient * |y - center|^gamma."""

    kind = "power"

    def __init__(self, gamma, center=0.0, coefficient=1.0, n=None):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if n is not None and c.size == 1 and n > 1:
            c = np.full(n, c[0])
        self.center = c
        self.n = c.size
        self.gamma = float(gamma)
        self.coefficient = float(coefficient)
        if self.gamma < 0:
            raise DomainError("field 'gamma' must be >= 0 (use riesz_kernel for singular powers)")
        self.smoothness = "C_inf away from center" if self.gamma % 2 else "C_inf"

    @property
    def growth(self):
        return self.gamma if self.coefficient != 0 else 0.0

    def singular_points(self):
        return [self.center] if self.gamma % 2 else []

    def _eval(self, y):
        return self.coefficient * _norm(y - self.center) ** self.gamma

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        x = np.asarray(x, dtype=float).reshape(self.n)
        d = float(np.linalg.norm(x - self.center))
        if d == 0.0:
            return self.coefficient * rho ** self.gamma
        return self.coefficient * _power_deviation(d, rho, -self.gamma, self.n)

    def shifted(self, h):
        return Power(self.gamma, self.center + np.reshape(h, self.n), self.coefficient)

    def scaled(self, lam):
        return Power(self.gamma, self.center / lam, self.coefficient * lam ** self.gamma)

    def params(self):
        return {"gamma": self.gamma, "center": self.center.tolist(), "coefficient": self.coefficient}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p["gamma"], p.get("center", 0.0), p.get("coefficient", 1.0), p.get("n"))


class RieszKernel(FunctionSpec):
    """weight * c_riesz * |y - pole|^(alpha - n), the fundamental solution."""

    kind = "riesz_kernel"
    smoothness = "C_inf away from pole"

    def __init__(self, pole, alpha, weight=1.0):
        self.pole = np.atleast_1d(np.asarray(pole, dtype=float))
        self.n = self.pole.size
        self.alpha = float(alpha)
        self.weight = float(weight)
        c = constants(FracParams(self.n, self.alpha)).c_riesz
        if c is None:
            raise UnsupportedRegimeError(f"riesz_kernel needs n > alpha (n={self.n}, alpha={self.alpha})")
        self.coefficient = self.weight * c

    @property
    def growth(self):
        return self.alpha - self.n

    def singular_points(self):
        return [self.pole]

    def _eval(self, y):
        return self.coefficient * _norm(y - self.pole) ** (self.alpha - self.n)

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        x = np.asarray(x, dtype=float).reshape(self.n)
        d = float(np.linalg.norm(x - self.pole))
        if d == 0.0:
            raise DomainError("riesz_kernel deviation requested at the pole")
        return self.coefficient * _power_deviation(d, rho, self.n - self.alpha, self.n)

    def shifted(self, h):
        return RieszKernel(self.pole + np.reshape(h, self.n), self.alpha, self.weight)

    def params(self):
        return {"pole": self.pole.tolist(), "alpha": self.alpha, "weight": self.weight}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        return cls(p["pole"], p["alpha"], p.get("weight", 1.0))


class Samples(FunctionSpec):
    """Piecewise-linear interpolant of 1-D samples.

    Outside the hull the end value is continued as v_end (1 + dist)^(-decay).
    """

    kind = "samples"
    smoothness = "C0 piecewise linear"

    def __init__(self, points, values, decay_exponent=0.0):
        pts = np.asarray(points, dtype=float).ravel()
        vals = np.asarray(values, dtype=float).ravel()
        if pts.size != vals.size or pts.size < 2:
            raise DomainError("fields 'points'/'values' must have equal length >= 2")
        order = np.argsort(pts)
        self.points, self.values = pts[order], vals[order]
        if np.any(np.diff(self.points) <= 0):
            raise DomainError("field 'points' must be distinct")
        self.decay = float(decay_exponent)
        self.n = 1
        self.h = float(np.max(np.diff(self.points)))

    @property
    def growth(self):
        return -self.decay

    @property
    def scale(self):
        return self.h

    def singular_points(self):
        return [np.array([p]) for p in self.points]

    def is_smooth_at(self, x):
        x = float(np.ravel(x)[0])
        lo, hi = self.points[0], self.points[-1]
        return min(abs(x - lo), abs(x - hi)) >= 2 * self.h

    def _eval(self, y):
        y = y[..., 0]
        out = np.interp(y, self.points, self.values)
        lo, hi = self.points[0], self.points[-1]
        left, right = y < lo, y > hi
        out = np.where(left, self.values[0] * (1.0 + np.abs(y - lo)) ** (-self.decay), out)
        out = np.where(right, self.values[-1] * (1.0 + np.abs(y - hi)) ** (-self.decay), out)
        return out

    def params(self):
        return {"points": self.points.tolist(), "values": self.values.tolist()}

    def to_dict(self):
        return {"kind": self.kind, "params": self.params(), "decay_exponent": self.decay}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        decay = spec.get("decay_exponent", 0.0)
        if "path" in p:
            path = Path(p["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            pts, vals = [], []
            with open(path, newline="") as fh:
                for row in csv.reader(fh):
                    if not row or row[0].strip().lower() in ("x", "point", "points"):
                        continue
                    pts.append(float(row[0]))
                    vals.append(float(row[1]))
            return cls(pts, vals, decay)
        return cls(p["points"], p["values"], decay)


class Sum(FunctionSpec):
    """Linear combination sum_i c_i u_i of specs in the same dimension."""

    kind = "sum"

    def __init__(self, terms, coefficients=None):
        flat, coefs = [], []
        coefficients = [1.0] * len(terms) if coefficients is None else list(coefficients)
        for t, c in zip(terms, coefficients):
            if isinstance(t, Sum):
                flat.extend(t.terms)
                coefs.extend(c * ci for ci in t.coefficients)
            else:
                flat.append(t)
                coefs.append(float(c))
        if len({t.n for t in flat}) != 1:
            raise DomainError("sum terms must share the same dimension")
        self.terms, self.coefficients = flat, coefs
        self.n = flat[0].n
        self.smoothness = "C_inf" if all(t.smoothness == "C_inf" for t in flat) else "piecewise"

    @property
    def growth(self):
        gs = [t.growth for t, c in zip(self.terms, self.coefficients) if c != 0]
        return max(gs) if gs else 0.0

    @property
    def scale(self):
        s = [t.scale for t in self.terms if t.scale]
        return min(s) if s else None

    @property
    def period(self):
        ps = {t.period for t, c in zip(self.terms, self.coefficients) if c != 0 and t.period}
        return ps.pop() if len(ps) == 1 else None

    def singular_points(self):
        return [p for t in self.terms for p in t.singular_points()]

    def is_smooth_at(self, x):
        return all(t.is_smooth_at(x) for t in self.terms)

    def _eval(self, y):
        return sum(c * t._eval(y) for t, c in zip(self.terms, self.coefficients))

    def deviation(self, x, rho, cfg=DEFAULT_CONFIG):
        return math.fsum(c * t.deviation(x, rho, cfg) for t, c in zip(self.terms, self.coefficients))

    def second_difference(self, x, z):
        return sum(c * t.second_difference(x, z) for t, c in zip(self.terms, self.coefficients))

    def shifted(self, h):
        return Sum([t.shifted(h) for t in self.terms], self.coefficients)

    def scaled(self, lam):
        return Sum([t.scaled(lam) for t in self.terms], self.coefficients)

    def params(self):
        return {"terms": [t.to_dict() for t in self.terms], "coefficients": self.coefficients}

    @classmethod
    def _from_params(cls, p, spec, base_dir):
        terms = [FunctionSpec.from_dict(t, base_dir) for t in p["terms"]]
        return cls(terms, p.get("coefficients"))


KINDS = {
    cls.kind: cls for cls in (Constant, Affine, Gaussian, Cosine, Power, RieszKernel, Samples, Sum)
}
