"""Hot numeric kernels, numba-compiled when available.

Every kernel has a pure-numpy implementation (``*_np``).  When numba imports
successfully and the environment variable ``FRACTRAP_NO_NUMBA`` is unset or
empty, the module-level names point at ``@njit``-compiled versions; otherwise
they point at the numpy fallbacks.  ``benchmarks/bench_kernels.py`` times the
two paths against each other.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = bool(os.environ.get("FRACTRAP_NO_NUMBA"))

try:
    if _DISABLED:
        raise ImportError("numba disabled via FRACTRAP_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    njit = None


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------


def miller_power_np(a: np.ndarray, beta: float, n_terms: int) -> np.ndarray:
    # v[n] = sum_{j=1}^{min(n, deg)} ((beta+1)*j/n - 1) * a[j] * v[n-j]
    v = np.zeros(n_terms + 1)
    v[0] = 1.0
    deg = len(a) - 1
    for n in range(1, n_terms + 1):
        k = min(n, deg)
        acc = 0.0
        for j in range(1, k + 1):
            acc += ((beta + 1.0) * j / n - 1.0) * a[j] * v[n - j]
        v[n] = acc
    return v


def binomial_np(sign: float, beta: float, n_terms: int) -> np.ndarray:
    # two-term recursion for the coefficients of (1 + sign*xi)**beta; the
    # arithmetic matches miller_power_np on a = [1, sign] term for term
    w = np.empty(n_terms + 1)
    w[0] = 1.0
    for n in range(1, n_terms + 1):
        w[n] = ((beta + 1.0) * 1 / n - 1.0) * sign * w[n - 1]
    return w


def fbdf_printed_np(alpha: float, n_terms: int) -> np.ndarray:
    # the published two-term recursion, transcribed verbatim (second factor
    # 4/3); kept only as a cross-check against the Miller-formula expansion
    w = np.empty(n_terms + 1)
    w[0] = 1.0
    if n_terms >= 1:
        w[1] = (4.0 / 3.0) * alpha
    for n in range(2, n_terms + 1):
        w[n] = (4.0 / 3.0) * (1.0 + (alpha - 1.0) / n) * w[n - 1] + (
            4.0 / 3.0
        ) * (2.0 * (1.0 - alpha) / n - 1.0) * w[n - 2]
    return w


def pi_graded_row_np(alpha: float, r: float, n: int) -> tuple[float, np.ndarray]:
    # phi_j = ((nr-jm)^b - (nr-jr)^b) / (jr-jm) with b = alpha+1 suffers
    # catastrophic cancellation for j << n (nr can exceed 1e13), so the
    # difference of powers is evaluated as A^b * expm1(b*log1p(d/A))
    beta = alpha + 1.0
    nr = float(n) ** r
    j = np.arange(1.0, n + 1.0)
    jr = j**r
    jm = (j - 1.0) ** r
    d = jr - jm
    A = nr - jr
    phi = np.empty(n)
    if n > 1:
        head = A[: n - 1]
        phi[: n - 1] = head**beta * np.expm1(beta * np.log1p(d[: n - 1] / head)) / d[: n - 1]
    phi[n - 1] = d[n - 1] ** beta / d[n - 1]
    b = np.empty(n)
    b[: n - 1] = phi[: n - 1] - phi[1:]
    b[n - 1] = d[n - 1] ** alpha
    if n == 1:
        w = alpha
    else:
        # stable form of (nr-1)^beta - nr^alpha*(nr-alpha-1)
        w = nr**beta * (np.expm1(beta * np.log1p(-1.0 / nr)) + beta / nr)
    return w, b


def lag_tail_np(omega: np.ndarray, f: np.ndarray, lo: int, n: int) -> np.ndarray:
    # sum_{j=lo}^{n-1} omega[n-j] * f[j]
    if n <= lo:
        return np.zeros(f.shape[1])
    return omega[n - lo : 0 : -1] @ f[lo:n]


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _miller_power_nb(a, beta, n_terms):  # pragma: no cover - jitted
        v = np.zeros(n_terms + 1)
        v[0] = 1.0
        deg = len(a) - 1
        for n in range(1, n_terms + 1):
            k = min(n, deg)
            acc = 0.0
            for j in range(1, k + 1):
                acc += ((beta + 1.0) * j / n - 1.0) * a[j] * v[n - j]
            v[n] = acc
        return v

    @njit(cache=True)
    def _binomial_nb(sign, beta, n_terms):  # pragma: no cover - jitted
        w = np.empty(n_terms + 1)
        w[0] = 1.0
        for n in range(1, n_terms + 1):
            w[n] = ((beta + 1.0) * 1 / n - 1.0) * sign * w[n - 1]
        return w

    @njit(cache=True)
    def _fbdf_printed_nb(alpha, n_terms):  # pragma: no cover - jitted
        w = np.empty(n_terms + 1)
        w[0] = 1.0
        if n_terms >= 1:
            w[1] = (4.0 / 3.0) * alpha
        for n in range(2, n_terms + 1):
            w[n] = (4.0 / 3.0) * (1.0 + (alpha - 1.0) / n) * w[n - 1] + (
                4.0 / 3.0
            ) * (2.0 * (1.0 - alpha) / n - 1.0) * w[n - 2]
        return w

    @njit(cache=True)
    def _pi_graded_row_nb(alpha, r, n):  # pragma: no cover - jitted
        beta = alpha + 1.0
        nr = float(n) ** r
        b = np.empty(n)
        phi_prev = 0.0
        for j in range(1, n + 1):
            jr = float(j) ** r
            jm = float(j - 1) ** r
            d = jr - jm
            A = nr - jr
            if j < n:
                # cancellation-safe difference of powers, see numpy twin
                phi = A**beta * np.expm1(beta * np.log1p(d / A)) / d
            else:
                phi = d**beta / d
            if j >= 2:
                b[j - 2] = phi_prev - phi
            phi_prev = phi
        b[n - 1] = (float(n) ** r - float(n - 1) ** r) ** alpha
        if n == 1:
            w = alpha
        else:
            w = nr**beta * (np.expm1(beta * np.log1p(-1.0 / nr)) + beta / nr)
        return w, b

    @njit(cache=True)
    def _lag_tail_nb(omega, f, lo, n):  # pragma: no cover - jitted
        q = f.shape[1]
        out = np.zeros(q)
        for j in range(lo, n):
            w = omega[n - j]
            for k in range(q):
                out[k] += w * f[j, k]
        return out

    def miller_power(a, beta, n_terms):
        return _miller_power_nb(np.ascontiguousarray(a, dtype=np.float64), beta, n_terms)

    def binomial(sign, beta, n_terms):
        return _binomial_nb(float(sign), beta, n_terms)

    def fbdf_printed(alpha, n_terms):
        return _fbdf_printed_nb(alpha, n_terms)

    def pi_graded_row(alpha, r, n):
        return _pi_graded_row_nb(alpha, r, n)

    def lag_tail(omega, f, lo, n):
        return _lag_tail_nb(omega, f, lo, n)

else:
    miller_power = miller_power_np
    binomial = binomial_np
    fbdf_printed = fbdf_printed_np
    pi_graded_row = pi_graded_row_np
    lag_tail = lag_tail_np


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    miller_power(np.array([1.0, -4.0 / 3.0, 1.0 / 3.0]), -0.5, 4)
    binomial(-1.0, -0.5, 4)
    fbdf_printed(0.5, 4)
    pi_graded_row(0.5, 2.0, 3)
    lag_tail(np.arange(5.0), np.ones((4, 1)), 0, 4)
