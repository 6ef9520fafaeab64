"""Numerical tools for the fractional Laplacian (-Laplacian)^(alpha/2), 0 < alpha < 2."""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    ConsistencyError,
    DivergenceError,
    DomainError,
    EvaluationError,
    FracLapError,
    NotInLalphaError,
    SingularityError,
    SolverError,
    UnsupportedRegimeError,
)
from .functions import (
    Affine,
    Constant,
    Cosine,
    FunctionSpec,
    Gaussian,
    Power,
    RieszKernel,
    Samples,
    Sum,
)
from .kernels import BallSpec, FracParams, avg_kernel, constants, poisson_kernel, riesz_kernel
from .liouville import (
    DirichletProblem1D,
    check_liouville_hypotheses,
    exterior_radial_integral,
    liouville_demo,
    solve_dirichlet_1d,
)
from .operators import (
    DiscreteMeasure,
    GridFunction,
    SymbolSpec,
    alpha_average,
    apply_fourier_symbol,
    frac_laplacian_pv,
    is_alpha_harmonic,
    pizzetti_quotient,
    pizzetti_study,
    riesz_potential,
)
from .poisson import ExtensionProblem, poisson_extend, poisson_gradient, poisson_mass, riesz_reproduction_residual
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_radial
