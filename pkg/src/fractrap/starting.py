"""Starting-weight correction for the convolution-quadrature methods.

The quadrature is made exact on the non-smooth monomials t^nu that appear
in the true solution near t0.  The exponents nu come from
{i + j*alpha : i, j >= 0, nu < 1} with 1 appended; for each step n the
weights w_{n,0..s} solve a small Vandermonde-type linear system whose
matrix depends only on the exponent set, never on n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal

from .core import validate_order
from .weights import ConvolutionWeights

logger = logging.getLogger(__name__)

#: below this order the exponent set exceeds 21 entries and the linear
#: system becomes too ill-conditioned to trust
MIN_ALPHA = 0.05

COND_WARN = 1e8
COND_FAIL = 1e12

_DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class ExponentSet:
    """Sorted, de-duplicated exponents with 0 first and 1 last."""

    exponents: np.ndarray

    @property
    def s(self) -> int:
        return len(self.exponents) - 1

    @property
    def s_plus_1(self) -> int:
        return len(self.exponents)


@dataclass(frozen=True)
class StartingWeights:
    """Correction weights w_{n,0..s} for a single step n."""

    n: int
    w: np.ndarray


def exponent_set(alpha: float) -> ExponentSet:
    """Enumerate {i + j*alpha < 1} over i, j >= 0 and append 1."""
    validate_order(alpha)
    if alpha < MIN_ALPHA:
        raise ValueError(
            f"order {alpha} below {MIN_ALPHA}: the starting-weight system "
            "would exceed 21 unknowns and turn hopelessly ill-conditioned"
        )
    vals = []
    i = 0
    while i < 1.0:  # only i = 0 can stay below 1, kept explicit for clarity
        j = 0
        while i + j * alpha < 1.0:
            vals.append(i + j * alpha)
            j += 1
        i += 1
    vals.append(1.0)
    vals.sort()
    kept = [vals[0]]
    for v in vals[1:]:
        if v - kept[-1] > _DEDUP_TOL:
            kept.append(v)
    return ExponentSet(np.array(kept))


def _vandermonde(exponents: np.ndarray) -> np.ndarray:
    # V[k, j] = j^nu_k with the convention 0^0 = 1, 0^nu = 0 for nu > 0
    j = np.arange(len(exponents), dtype=float)
    return j[None, :] ** exponents[:, None]


def _check_condition(V: np.ndarray, alpha: float) -> None:
    cond = np.linalg.cond(V)
    if cond > COND_FAIL:
        raise ValueError(
            f"starting-weight matrix is numerically singular for "
            f"alpha={alpha} (condition estimate {cond:.3e})"
        )
    if cond > COND_WARN:
        logger.warning(
            "starting-weight matrix mildly ill-conditioned for alpha=%g "
            "(condition estimate %.3e)",
            alpha,
            cond,
        )


def _rl_moment(alpha: float, nu: float, n) -> np.ndarray:
    # Gamma(nu+1)/Gamma(1+nu+alpha) * n^(nu+alpha), the exact value the
    # corrected quadrature must reproduce on g(t) = t^nu (unit step)
    return (
        math.gamma(nu + 1.0)
        / math.gamma(1.0 + nu + alpha)
        * np.asarray(n, dtype=float) ** (nu + alpha)
    )


def _omega_array(omega) -> np.ndarray:
    if isinstance(omega, ConvolutionWeights):
        return omega.omega
    return np.asarray(omega, dtype=float)


def starting_weights(
    omega, alpha: float, n: int, E: ExponentSet
) -> StartingWeights:
    """Solve the exactness system for the weights of a single step n."""
    om = _omega_array(omega)
    if n < 1:
        raise ValueError("step index must be >= 1")
    if len(om) < n + 1:
        raise ValueError(f"need weights omega_0..omega_{n}, got {len(om)}")
    V = _vandermonde(E.exponents)
    _check_condition(V, alpha)
    j = np.arange(n + 1, dtype=float)
    rhs = np.empty(E.s_plus_1)
    for k, nu in enumerate(E.exponents):
        rhs[k] = -np.dot(om[n::-1], j**nu) + _rl_moment(alpha, nu, n)
    return StartingWeights(n, np.linalg.solve(V, rhs))


def starting_weight_table(
    omega, alpha: float, n_steps: int, E: ExponentSet
) -> np.ndarray:
    """Weights for every step at once, shape (n_steps+1, s+1); row 0 is zero.

    The convolution sums on the right-hand side are evaluated for all n
    with one FFT convolution per exponent, and the factorized system
    matrix is reused across the whole multi-right-hand-side solve.
    """
    om = _omega_array(omega)
    if len(om) < n_steps + 1:
        raise ValueError("weight vector shorter than the requested table")
    V = _vandermonde(E.exponents)
    _check_condition(V, alpha)
    lu = scipy.linalg.lu_factor(V)
    j = np.arange(n_steps + 1, dtype=float)
    rhs = np.empty((E.s_plus_1, n_steps + 1))
    # the FFT convolution's absolute error scales with the largest output
    # entry, which for growing weight sequences swamps the small early
    # rows; those rows are recomputed with direct dot products
    n_direct = min(n_steps, max(512, n_steps >> 6))
    for k, nu in enumerate(E.exponents):
        g = j**nu
        conv = scipy.signal.fftconvolve(om[: n_steps + 1], g)[: n_steps + 1]
        for n in range(1, n_direct + 1):
            conv[n] = np.dot(om[n::-1], g[: n + 1])
        rhs[k] = -conv + _rl_moment(alpha, nu, j)
    table = scipy.linalg.lu_solve(lu, rhs).T
    table[0] = 0.0
    return table
