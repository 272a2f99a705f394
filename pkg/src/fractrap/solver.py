"""Time-stepping drivers: startup block, Newton iteration, lag assembly."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    FdeProblem,
    Grid,
    MethodKind,
    Solution,
    SolveStats,
    taylor_table,
)
from .fastconv import LagAccumulator
from .starting import exponent_set, starting_weight_table
from .weights import convolution_weights, pi_graded_row, pi_uniform_weights

logger = logging.getLogger(__name__)

_SQRT_EPS = math.sqrt(np.finfo(float).eps)


@dataclass
class SolverConfig:
    """Newton-iteration knobs shared by all methods."""

    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    jacobian_mode: str = "auto"  # auto | analytic | fd
    fd_step_scale: float = 1.0

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be >= 1")
        if self.jacobian_mode not in ("auto", "analytic", "fd"):
            raise ValueError(f"unknown jacobian_mode {self.jacobian_mode!r}")


class NewtonError(RuntimeError):
    """Raised when an implicit solve fails to converge."""

    def __init__(self, message: str, residual: float = math.nan, step: Optional[int] = None):
        super().__init__(message)
        self.residual = residual
        self.step = step


@dataclass(frozen=True)
class ImplicitStepEquation:
    """One implicit step, y = g + c * f(t, y), with everything known in g."""

    g: np.ndarray
    c: float
    t: float


@dataclass
class NewtonResult:
    y: np.ndarray
    iterations: int
    residual: float


def _finite_difference_jacobian(problem: FdeProblem, scale: float):
    def jac(t, y):
        fy = np.asarray(problem.f(t, y), dtype=float)
        J = np.empty((problem.q, problem.q))
        for i in range(problem.q):
            step = scale * _SQRT_EPS * (1.0 + abs(y[i]))
            yp = y.copy()
            yp[i] += step
            J[:, i] = (np.asarray(problem.f(t, yp), dtype=float) - fy) / step
        return J

    return jac


def _jacobian_fn(problem: FdeProblem, config: SolverConfig):
    if config.jacobian_mode == "fd":
        return _finite_difference_jacobian(problem, config.fd_step_scale)
    if config.jacobian_mode == "analytic":
        if problem.jacobian is None:
            raise ValueError("jacobian_mode='analytic' but the problem has none")
        return problem.jacobian
    if problem.jacobian is not None:
        return problem.jacobian
    return _finite_difference_jacobian(problem, config.fd_step_scale)


class _StiffnessMonitor:
    """Warn once per solve when c * ||J|| makes the iteration marginal."""

    def __init__(self):
        self.warned = False

    def check(self, c: float, J: np.ndarray) -> None:
        if self.warned:
            return
        bound = abs(c) * np.linalg.norm(J, ord=np.inf)
        if bound > 0.5:
            logger.warning(
                "implicit-step contraction bound %.3g exceeds 0.5; Newton "
                "convergence may suffer, consider a smaller step size",
                bound,
            )
            self.warned = True


def newton_solve(
    eq: ImplicitStepEquation,
    problem: FdeProblem,
    y_guess: np.ndarray,
    config: SolverConfig,
    _monitor: Optional[_StiffnessMonitor] = None,
    _step: Optional[int] = None,
) -> NewtonResult:
    """Solve y = g + c f(t, y) by damped-free Newton from y_guess."""
    jac = _jacobian_fn(problem, config)
    y = np.array(y_guess, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("initial Newton guess is not finite")
    eye = np.eye(problem.q)
    res_norm = math.inf
    for k in range(config.newton_max_iter + 1):
        b = eq.g + eq.c * np.asarray(problem.f(eq.t, y), dtype=float) - y
        res_norm = np.linalg.norm(b)
        if res_norm <= config.newton_tol * (1.0 + np.linalg.norm(y)):
            return NewtonResult(y, k, res_norm)
        if k == config.newton_max_iter:
            break
        J = np.asarray(jac(eq.t, y), dtype=float)
        if _monitor is not None:
            _monitor.check(eq.c, J)
        A = eye - eq.c * J
        try:
            dy = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(
                f"singular Newton matrix at t={eq.t}: {exc}",
                residual=res_norm,
                step=_step,
            ) from exc
        y = y + dy
    raise NewtonError(
        f"Newton failed to converge within {config.newton_max_iter} "
        f"iterations at t={eq.t} (residual {res_norm:.3e})",
        residual=res_norm,
        step=_step,
    )


def startup_block(
    problem: FdeProblem,
    times: np.ndarray,
    h: float,
    omega: np.ndarray,
    start_w: np.ndarray,
    s: int,
    config: SolverConfig,
    _monitor: Optional[_StiffnessMonitor] = None,
) -> tuple[np.ndarray, int, float]:
    """Solve for y_1..y_s simultaneously from the stacked implicit system.

    Because the starting sums reach index s even for n < s, the first s
    approximations are coupled; one Newton iteration on the stacked
    unknown of size s*q avoids mixing in a different method.  Returns the
    block of solutions, the iteration count and the final residual norm.
    """
    q = problem.q
    alpha = problem.alpha
    ha = h**alpha
    jac = _jacobian_fn(problem, config)
    tay = taylor_table(problem, times[1 : s + 1])
    f0 = np.asarray(problem.f(times[0], problem.y0[0]), dtype=float)
    # combined weight of f_j in row n: convolution part (j <= n) + starting part
    M = np.zeros((s, s + 1))
    for n in range(1, s + 1):
        M[n - 1, 0] = omega[n] + start_w[n, 0]
        for j in range(1, s + 1):
            M[n - 1, j] = (omega[n - j] if j <= n else 0.0) + start_w[n, j]
    known = tay + ha * np.outer(M[:, 0], f0).reshape(s, q)

    Y = np.tile(problem.y0[0], (s, 1))

    def residual(Yc, fvals):
        return Yc - known - ha * (M[:, 1:] @ fvals)

    res_norm = math.inf
    for k in range(config.newton_max_iter + 1):
        fvals = np.array(
            [problem.f(times[j], Y[j - 1]) for j in range(1, s + 1)], dtype=float
        )
        F = residual(Y, fvals)
        res_norm = np.linalg.norm(F)
        if res_norm <= config.newton_tol * (1.0 + np.linalg.norm(Y)):
            return Y, k, res_norm
        if k == config.newton_max_iter:
            break
        A = np.eye(s * q)
        for j in range(1, s + 1):
            Jj = np.asarray(jac(times[j], Y[j - 1]), dtype=float)
            if _monitor is not None:
                _monitor.check(ha * M[j - 1, j], Jj)
            for n in range(1, s + 1):
                A[
                    (n - 1) * q : n * q, (j - 1) * q : j * q
                ] -= ha * M[n - 1, j] * Jj
        try:
            delta = np.linalg.solve(A, -F.ravel())
        except np.linalg.LinAlgError as exc:
            raise NewtonError(
                f"singular startup-block matrix: {exc}", residual=res_norm, step=1
            ) from exc
        Y = Y + delta.reshape(s, q)
    raise NewtonError(
        f"startup block failed to converge within {config.newton_max_iter} "
        f"iterations (residual {res_norm:.3e})",
        residual=res_norm,
        step=1,
    )


def _certify(y, g, c, fval, max_res):
    res = np.linalg.norm(y - g - c * fval)
    return max(max_res, res / (1.0 + np.linalg.norm(y)))


def _solve_flmm(problem, method, grid, config):
    t = grid.nodes
    N = grid.N
    q = problem.q
    alpha = problem.alpha
    h = grid.h
    ha = h**alpha
    om = convolution_weights(method, alpha, N).omega
    E = exponent_set(alpha)
    s = E.s
    if N <= s:
        raise ValueError(
            f"grid with {N} steps is too coarse for the startup block (s={s})"
        )
    W = starting_weight_table(om, alpha, N, E)
    tay = taylor_table(problem, t)
    monitor = _StiffnessMonitor()

    y = np.empty((N + 1, q))
    fv = np.empty((N + 1, q))
    iters = np.zeros(N + 1, dtype=int)
    y[0] = problem.y0[0]
    fv[0] = problem.f(t[0], y[0])

    block, block_iters, block_res = startup_block(
        problem, t, h, om, W, s, config, monitor
    )
    y[1 : s + 1] = block
    for n in range(1, s + 1):
        fv[n] = problem.f(t[n], y[n])
        iters[n] = block_iters
    max_res = block_res / (1.0 + np.linalg.norm(block))

    acc = LagAccumulator(om, N, q)
    for j in range(s + 1):
        acc.append(j, fv[j])
    c = ha * om[0]
    for n in range(s + 1, N + 1):
        g = tay[n] + ha * (W[n] @ fv[: s + 1]) + ha * acc.lag(n)
        result = newton_solve(
            ImplicitStepEquation(g, c, t[n]), problem, y[n - 1], config, monitor, n
        )
        y[n] = result.y
        iters[n] = result.iterations
        fv[n] = problem.f(t[n], y[n])
        max_res = _certify(y[n], g, c, fv[n], max_res)
        if n < N:
            acc.append(n, fv[n])
    return y, iters, max_res


def _solve_pi_uniform(problem, grid, config):
    t = grid.nodes
    N = grid.N
    q = problem.q
    alpha = problem.alpha
    scale = grid.h**alpha / math.gamma(alpha + 2.0)
    w_t, b_t = pi_uniform_weights(alpha, N)
    tay = taylor_table(problem, t)
    monitor = _StiffnessMonitor()

    y = np.empty((N + 1, q))
    fv = np.empty((N + 1, q))
    iters = np.zeros(N + 1, dtype=int)
    y[0] = problem.y0[0]
    fv[0] = problem.f(t[0], y[0])

    acc = LagAccumulator(b_t, N, q)
    acc.append(0, fv[0])
    c = scale * b_t[0]
    max_res = 0.0
    for n in range(1, N + 1):
        # the lag over b-tilde counts f_0 with weight b_t[n]; swap that for
        # the dedicated first-node weight w_t[n]
        g = tay[n] + scale * ((w_t[n] - b_t[n]) * fv[0] + acc.lag(n))
        result = newton_solve(
            ImplicitStepEquation(g, c, t[n]), problem, y[n - 1], config, monitor, n
        )
        y[n] = result.y
        iters[n] = result.iterations
        fv[n] = problem.f(t[n], y[n])
        max_res = _certify(y[n], g, c, fv[n], max_res)
        if n < N:
            acc.append(n, fv[n])
    return y, iters, max_res


def _solve_pi_graded(problem, grid, config):
    t = grid.nodes
    N = grid.N
    q = problem.q
    alpha = problem.alpha
    r = grid.grading
    h0 = grid.h0
    tay = taylor_table(problem, t)
    monitor = _StiffnessMonitor()

    y = np.empty((N + 1, q))
    fv = np.empty((N + 1, q))
    iters = np.zeros(N + 1, dtype=int)
    y[0] = problem.y0[0]
    fv[0] = problem.f(t[0], y[0])
    max_res = 0.0
    # no convolution structure: every row of weights is fresh, O(N^2) overall
    for n in range(1, N + 1):
        row = pi_graded_row(alpha, r, n, h0)
        lag = row.w_hat * fv[0]
        if n > 1:
            lag = lag + row.b_hat[: n - 1] @ fv[1:n]
        g = tay[n] + row.scale * lag
        c = row.scale * row.b_hat[n - 1]
        result = newton_solve(
            ImplicitStepEquation(g, c, t[n]), problem, y[n - 1], config, monitor, n
        )
        y[n] = result.y
        iters[n] = result.iterations
        fv[n] = problem.f(t[n], y[n])
        max_res = _certify(y[n], g, c, fv[n], max_res)
    return y, iters, max_res


def solve(
    problem: FdeProblem,
    method: MethodKind | str,
    grid: Grid,
    config: Optional[SolverConfig] = None,
) -> Solution:
    """Integrate the problem over the grid with the requested method."""
    method = MethodKind(method)
    config = config or SolverConfig()
    if method.needs_graded_grid and grid.kind != "graded":
        raise ValueError("PIG requires a graded grid")
    if not method.needs_graded_grid and grid.kind != "uniform":
        raise ValueError(f"{method.value} requires a uniform grid")
    if not (grid.t0 == problem.t0 and grid.T == problem.T):
        raise ValueError("grid interval does not match the problem interval")

    tic = time.perf_counter()
    if method is MethodKind.PIG:
        y, iters, max_res = _solve_pi_graded(problem, grid, config)
    elif method is MethodKind.PIU:
        y, iters, max_res = _solve_pi_uniform(problem, grid, config)
    else:
        y, iters, max_res = _solve_flmm(problem, method, grid, config)
    wall = time.perf_counter() - tic
    return Solution(
        times=grid.nodes,
        values=y,
        method=method,
        stats=SolveStats(newton_iterations=iters, max_residual=max_res, wall_time=wall),
    )


def eoc(errors: Sequence[tuple[int, float]]) -> list[float]:
    """Estimated orders of convergence, log2(E(N)/E(2N)), from (N, E) pairs."""
    if len(errors) < 2:
        return []
    out = []
    for (n1, e1), (n2, e2) in zip(errors, errors[1:]):
        if n2 != 2 * n1:
            raise ValueError(f"grid sizes must double: {n1} -> {n2}")
        out.append(math.log2(e1 / e2))
    return out


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------


@dataclass
class MethodStudy:
    method: MethodKind
    n_values: list[int]
    errors: list[float]
    eocs: list[float]
    seconds: list[float]


@dataclass
class ConvergenceStudy:
    problem_label: str
    alpha: float
    reference_n: int
    reference_value: np.ndarray
    results: dict = field(default_factory=dict)


def grid_for(problem: FdeProblem, method: MethodKind, N: int, grading=None) -> Grid:
    """The natural grid for a method: graded with r = 2/alpha for PIG."""
    if MethodKind(method).needs_graded_grid:
        r = grading if grading is not None else 2.0 / problem.alpha
        return Grid.graded(problem.t0, problem.T, N, r)
    return Grid.uniform(problem.t0, problem.T, N)


def reference_solution(
    problem: FdeProblem,
    n_ref: int,
    config: Optional[SolverConfig] = None,
) -> np.ndarray:
    """Endpoint value of an FT solve on a fine uniform grid."""
    sol = solve(problem, MethodKind.FT, Grid.uniform(problem.t0, problem.T, n_ref), config)
    return sol.values[-1]

def convergence_study(
    problem: FdeProblem,
    methods: Sequence[MethodKind | str],
    n_values: Sequence[int],
    grading: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    ref_factor: int = 8,
    reference: Optional[np.ndarray] = None,
    label: str = "",
) -> ConvergenceStudy:
    """Errors at t=T (max norm) and EOC per method over a doubling N ladder.

    The reference is an FT solve on a grid ``ref_factor`` times finer than
    the finest ladder rung unless one is passed in.
    """
    n_values = [int(n) for n in n_values]
    n_ref = ref_factor * max(n_values)
    if reference is None:
        reference = reference_solution(problem, n_ref, config)
    study = ConvergenceStudy(
        problem_label=label,
        alpha=problem.alpha,
        reference_n=n_ref,
        reference_value=reference,
    )
    for method in methods:
        method = MethodKind(method)
        errs, secs = [], []
        for N in n_values:
            sol = solve(problem, method, grid_for(problem, method, N, grading), config)
            errs.append(float(np.max(np.abs(sol.values[-1] - reference))))
            secs.append(sol.stats.wall_time)
        study.results[method] = MethodStudy(
            method=method,
            n_values=list(n_values),
            errors=errs,
            eocs=eoc(list(zip(n_values, errs))),
            seconds=secs,
        )
    return study
