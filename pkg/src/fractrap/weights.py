"""Convolution quadrature weights and formal-power-series utilities.

All five methods are driven from here: the three convolution-quadrature
methods (FT, NG, FBDF) get their weights from power-series manipulations of
their generating functions, the product-integration rules from closed
formulas on uniform and graded grids.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import _kernels
from .core import MethodKind

logger = logging.getLogger(__name__)

#: below this truncation length a direct Cauchy product beats the FFT one
FFT_PRODUCT_THRESHOLD = 128


@dataclass(frozen=True)
class ConvolutionWeights:
    """Quadrature weights omega_0..omega_N of one method at one order."""

    omega: np.ndarray
    alpha: float
    method: MethodKind


@dataclass(frozen=True)
class PiGradedRow:
    """One row of graded-grid product-integration weights.

    The step update reads
    ``y_n = T(t_n) + scale * (w_hat * f_0 + sum_j b_hat[j-1] * f_j)``
    with ``scale = h0^alpha / Gamma(alpha+2)``.
    """

    w_hat: float
    b_hat: np.ndarray
    scale: float


def miller_power(a, beta: float, n_terms: int) -> np.ndarray:
    """Coefficients of (sum_n a_n xi^n)^beta via the J.C.P. Miller recursion.

    Requires a[0] == 1.  Cost O(n_terms * min(n_terms, deg a)).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("coefficient vector must be one-dimensional and non-empty")
    if a[0] != 1.0:
        raise ValueError(f"Miller recursion needs a[0] == 1, got {a[0]}")
    if n_terms < 0:
        raise ValueError("number of terms must be >= 0")
    return _kernels.miller_power(a, float(beta), int(n_terms))


def binomial_weights(sign: int, beta: float, n_terms: int) -> np.ndarray:
    """Coefficients of (1 +/- xi)^beta via the two-term recursion, O(N)."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if n_terms < 0:
        raise ValueError("number of terms must be >= 0")
    return _kernels.binomial(float(sign), float(beta), int(n_terms))


def fps_product(u, v, n_terms: int) -> np.ndarray:
    """Truncated Cauchy product of two coefficient vectors, n_terms+1 entries.

    Short products are evaluated directly; from ``FFT_PRODUCT_THRESHOLD``
    on, a zero-padded real FFT (padding >= 2N, so no circular aliasing)
    does the job in O(N log N).
    """
    u = np.asarray(u, dtype=float)[: n_terms + 1]
    v = np.asarray(v, dtype=float)[: n_terms + 1]
    if len(u) == 0 or len(v) == 0:
        raise ValueError("both factors need at least one coefficient")
    if n_terms < FFT_PRODUCT_THRESHOLD:
        full = np.convolve(u, v)
    else:
        size = scipy.fft.next_fast_len(2 * (n_terms + 1))
        full = scipy.fft.irfft(
            scipy.fft.rfft(u, size) * scipy.fft.rfft(v, size), size
        )
    out = np.zeros(n_terms + 1)
    out[: min(n_terms + 1, len(full))] = full[: n_terms + 1]
    return out


def ft_weights(alpha: float, n_terms: int) -> ConvolutionWeights:
    """Fractional trapezoidal weights: 2^-alpha (1+xi)^alpha (1-xi)^-alpha."""
    plus = binomial_weights(+1, alpha, n_terms)
    minus = binomial_weights(-1, -alpha, n_terms)
    omega = 2.0 ** (-alpha) * fps_product(plus, minus, n_terms)
    return ConvolutionWeights(omega, alpha, MethodKind.FT)


def ng_weights(alpha: float, n_terms: int) -> ConvolutionWeights:
    """Newton-Gregory weights from the one-step closed recursion.

    omega_0 = 1 - alpha/2 and
    omega_n = (1 - alpha/2) c_n + (alpha/2) c_{n-1} with c the coefficients
    of (1-xi)^-alpha.
    """
    c = binomial_weights(-1, -alpha, n_terms)
    omega = (1.0 - alpha / 2.0) * c
    omega[1:] += (alpha / 2.0) * c[:-1]
    return ConvolutionWeights(omega, alpha, MethodKind.NG)


def _fbdf_printed_recursion(alpha: float, n_terms: int) -> np.ndarray:
    """The published FBDF recursion transcribed as printed (cross-check only)."""
    return _kernels.fbdf_printed(float(alpha), int(n_terms))


def fbdf_weights(alpha: float, n_terms: int) -> ConvolutionWeights:
    """Fractional BDF2 weights, (2/3)^alpha (1 - 4xi/3 + xi^2/3)^-alpha.

    The Miller expansion of the quadratic denominator is the ground truth;
    the printed two-term recursion is evaluated alongside and, where the
    two disagree beyond 1e-10 relative, the Miller result wins.  (The
    printed recursion carries a factor 4/3 on its second term where the
    Miller expansion yields 1/3, so they part ways from n=2 on.)
    """
    raw = miller_power([1.0, -4.0 / 3.0, 1.0 / 3.0], -alpha, n_terms)
    printed = _fbdf_printed_recursion(alpha, n_terms)
    scale = np.maximum(np.abs(raw), 1.0)
    if np.any(np.abs(printed - raw) > 1e-10 * scale):
        logger.debug(
            "printed FBDF recursion deviates from the Miller expansion "
            "(alpha=%g); using the Miller coefficients",
            alpha,
        )
    omega = (2.0 / 3.0) ** alpha * raw
    return ConvolutionWeights(omega, alpha, MethodKind.FBDF)


def convolution_weights(
    method: MethodKind, alpha: float, n_terms: int
) -> ConvolutionWeights:
    """Weights for one of the convolution-quadrature methods FT/NG/FBDF."""
    method = MethodKind(method)
    if method is MethodKind.FT:
        return ft_weights(alpha, n_terms)
    if method is MethodKind.NG:
        return ng_weights(alpha, n_terms)
    if method is MethodKind.FBDF:
        return fbdf_weights(alpha, n_terms)
    raise ValueError(f"{method.value} is not a convolution-quadrature method")


def pi_uniform_weights(alpha: float, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform-grid product-integration weights (w_tilde, b_tilde).

    w_tilde[n] = (alpha+1-n) n^alpha + (n-1)^(alpha+1) multiplies f_0;
    b_tilde is the convolution kernel, b_tilde[0] = 1 and for n >= 1 the
    second difference of n^(alpha+1).  The scheme carries the common scale
    h^alpha / Gamma(alpha+2).
    """
    if n_steps < 1:
        raise ValueError("need at least one step")
    n = np.arange(n_steps + 1, dtype=float)
    w = np.empty(n_steps + 1)
    w[0] = 0.0  # unused: the n=0 node is the initial value
    w[1:] = (alpha + 1.0 - n[1:]) * n[1:] ** alpha + (n[1:] - 1.0) ** (alpha + 1.0)
    p = np.arange(n_steps + 2, dtype=float) ** (alpha + 1.0)
    b = np.empty(n_steps + 1)
    b[0] = 1.0
    b[1:] = p[:-2] - 2.0 * p[1:-1] + p[2:]
    return w, b


def pi_graded_row(alpha: float, r: float, n: int, h0: float = 1.0) -> PiGradedRow:
    """Row n of the graded-grid product-integration weights, O(n).

    ``b_hat[j-1]`` multiplies f_j for j = 1..n; the last entry is
    (n^r - (n-1)^r)^alpha and multiplies the implicit unknown.
    """
    if n < 1:
        raise ValueError("row index must be >= 1")
    if r < 1.0:
        raise ValueError(f"grading exponent must be >= 1, got {r}")
    w_hat, b_hat = _kernels.pi_graded_row(float(alpha), float(r), int(n))
    scale = h0**alpha / math.gamma(alpha + 2.0)
    return PiGradedRow(float(w_hat), b_hat, scale)
