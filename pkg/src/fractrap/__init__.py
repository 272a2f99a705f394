"""Second-order implicit solvers for Caputo fractional initial value problems.

Five schemes share one interface: a product-integral trapezoidal rule on
uniform (PIU) and graded (PIG) grids, and three convolution quadratures
generated by the trapezoidal (FT), Newton-Gregory (NG), and BDF2 (FBDF)
linear multistep formulas.  The convolution methods evaluate their history
sums with a blocked FFT scheme and correct low-regularity behaviour near
the initial time with starting weights.
"""

from .core import (
    FdeProblem,
    Grid,
    MethodKind,
    Solution,
    SolveStats,
    rl_power_integral,
    taylor_term,
    validate_order,
)
from .fastconv import LagAccumulator, lag_direct
from .problems import brusselator_steady_state, make_brusselator, make_linear
from .solver import (
    ConvergenceStudy,
    MethodStudy,
    NewtonError,
    SolverConfig,
    convergence_study,
    eoc,
    grid_for,
    reference_solution,
    solve,
)
from .stability import (
    GeneratingFunction,
    StabilityBoundary,
    a_alpha_stable,
    boundary_locus,
    generating_function,
    sector_contains,
)
from .starting import exponent_set, starting_weight_table, starting_weights
from .weights import (
    ConvolutionWeights,
    convolution_weights,
    fbdf_weights,
    ft_weights,
    ng_weights,
    pi_graded_row,
    pi_uniform_weights,
)

try:
    from importlib.metadata import version as _version

    __version__ = _version("fractrap")
except Exception:  # pragma: no cover - source tree without install
    __version__ = "0.1.0"

__all__ = [
    "ConvergenceStudy",
    "ConvolutionWeights",
    "FdeProblem",
    "GeneratingFunction",
    "Grid",
    "LagAccumulator",
    "MethodKind",
    "MethodStudy",
    "NewtonError",
    "Solution",
    "SolveStats",
    "SolverConfig",
    "StabilityBoundary",
    "a_alpha_stable",
    "boundary_locus",
    "brusselator_steady_state",
    "convergence_study",
    "convolution_weights",
    "eoc",
    "exponent_set",
    "fbdf_weights",
    "ft_weights",
    "generating_function",
    "grid_for",
    "lag_direct",
    "make_brusselator",
    "make_linear",
    "ng_weights",
    "pi_graded_row",
    "pi_uniform_weights",
    "reference_solution",
    "rl_power_integral",
    "sector_contains",
    "solve",
    "starting_weight_table",
    "starting_weights",
    "taylor_term",
    "validate_order",
]
