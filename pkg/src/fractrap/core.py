"""Problem, grid, and solution data model shared by all methods."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

Jacobian = Callable[[float, np.ndarray], np.ndarray]
VectorField = Callable[[float, np.ndarray], np.ndarray]


class MethodKind(str, Enum):
    """The five implemented methods."""

    PIU = "PIU"  # product-integration trapezoidal rule, uniform grid
    PIG = "PIG"  # product-integration trapezoidal rule, graded grid
    FT = "FT"  # fractional trapezoidal rule
    NG = "NG"  # Newton-Gregory formula
    FBDF = "FBDF"  # fractional BDF2 formula

    @property
    def needs_graded_grid(self) -> bool:
        return self is MethodKind.PIG

    @property
    def is_flmm(self) -> bool:
        """True for the convolution-quadrature methods with starting weights."""
        return self in (MethodKind.FT, MethodKind.NG, MethodKind.FBDF)


def validate_order(alpha: float) -> None:
    """Reject orders outside the supported open range (0, 2) \\ {1}.

    Integer orders collapse to classical ODE methods and break the
    starting-weight machinery, so they are refused outright.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"fractional order must lie in (0, 2), got {alpha}")
    if alpha == int(alpha):
        raise ValueError(
            f"integer order {alpha} is not supported; use a classical ODE solver"
        )


@dataclass(frozen=True)
class FdeProblem:
    """Caputo-type initial value problem D^alpha y = f(t, y) on [t0, T].

    ``y0`` holds the m = ceil(alpha) initial vectors y(t0), y'(t0), ...
    each of dimension ``q``.
    """

    alpha: float
    t0: float
    T: float
    y0: tuple
    f: VectorField
    q: int = 1
    jacobian: Optional[Jacobian] = None

    def __post_init__(self):
        validate_order(self.alpha)
        if not self.T > self.t0:
            raise ValueError(f"need T > t0, got [{self.t0}, {self.T}]")
        if self.q < 1:
            raise ValueError("state dimension q must be >= 1")
        vecs = tuple(
            np.atleast_1d(np.asarray(v, dtype=float)) for v in self.y0
        )
        if len(vecs) != self.m:
            raise ValueError(
                f"expected {self.m} initial vectors for order {self.alpha}, "
                f"got {len(vecs)}"
            )
        for v in vecs:
            if v.shape != (self.q,):
                raise ValueError(
                    f"initial vectors must have shape ({self.q},), got {v.shape}"
                )
        object.__setattr__(self, "y0", vecs)

    @property
    def m(self) -> int:
        """Smallest integer strictly greater than alpha."""
        return int(math.floor(self.alpha)) + 1


def taylor_term(problem: FdeProblem, t: float) -> np.ndarray:
    """Taylor polynomial of the initial data, sum_k (t-t0)^k/k! * y0[k]."""
    dt = float(t) - problem.t0
    if dt < 0:
        raise ValueError(f"t={t} lies before t0={problem.t0}")
    out = problem.y0[0].copy()
    fac = 1.0
    for k in range(1, problem.m):
        fac *= dt / k
        out = out + fac * problem.y0[k]
    return out


def taylor_table(problem: FdeProblem, times: np.ndarray) -> np.ndarray:
    """Taylor polynomial evaluated at every node, shape (len(times), q)."""
    dt = np.asarray(times, dtype=float) - problem.t0
    out = np.tile(problem.y0[0], (len(dt), 1))
    fac = np.ones_like(dt)
    for k in range(1, problem.m):
        fac = fac * dt / k
        out += fac[:, None] * problem.y0[k]
    return out


def rl_power_integral(alpha: float, nu: float, t: float, t0: float) -> float:
    """Riemann-Liouville integral of order alpha of (t-t0)^nu.

    Equals Gamma(nu+1)/Gamma(alpha+nu+1) * (t-t0)^(alpha+nu); requires
    nu > -1 for the integral to exist.
    """
    if nu <= -1.0:
        raise ValueError(f"exponent nu must exceed -1, got {nu}")
    dt = float(t) - float(t0)
    if dt == 0.0:
        return 0.0
    return math.gamma(nu + 1.0) / math.gamma(alpha + nu + 1.0) * dt ** (alpha + nu)


@dataclass(frozen=True)
class Grid:
    """Node set on [t0, T]: uniform, or graded with exponent r >= 1.

    Graded nodes follow t_n = t0 + (n/N)^r (T - t0) and cluster near t0;
    every node comes from the closed formula, never cumulative summation.
    """

    t0: float
    T: float
    N: int
    grading: Optional[float] = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("grid needs at least one step")
        if not self.T > self.t0:
            raise ValueError(f"need T > t0, got [{self.t0}, {self.T}]")
        if self.grading is not None and self.grading < 1.0:
            raise ValueError(f"grading exponent must be >= 1, got {self.grading}")

    @classmethod
    def uniform(cls, t0: float, T: float, N: int) -> "Grid":
        return cls(float(t0), float(T), int(N))

    @classmethod
    def graded(cls, t0: float, T: float, N: int, r: float) -> "Grid":
        return cls(float(t0), float(T), int(N), float(r))

    @property
    def kind(self) -> str:
        return "uniform" if self.grading is None else "graded"

    @property
    def h(self) -> float:
        """Constant step of a uniform grid."""
        if self.grading is not None:
            raise ValueError("graded grid has no constant step; use h0")
        return (self.T - self.t0) / self.N

    @property
    def h0(self) -> float:
        """First step of a graded grid, (T-t0)/N^r."""
        if self.grading is None:
            return self.h
        return (self.T - self.t0) / self.N**self.grading

    @property
    def nodes(self) -> np.ndarray:
        n = np.arange(self.N + 1, dtype=float)
        if self.grading is None:
            return self.t0 + n * ((self.T - self.t0) / self.N)
        return self.t0 + (n / self.N) ** self.grading * (self.T - self.t0)


@dataclass
class SolveStats:
    """Per-run diagnostics: Newton counts, implicit residual, wall time."""

    newton_iterations: np.ndarray
    max_residual: float
    wall_time: float


@dataclass
class Solution:
    """Numerical trajectory on a grid; values has shape (N+1, q)."""

    times: np.ndarray
    values: np.ndarray
    method: MethodKind
    stats: SolveStats
