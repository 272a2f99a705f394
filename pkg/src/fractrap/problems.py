"""Built-in test problems with analytic Jacobians."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .core import FdeProblem, validate_order


def make_linear(
    alpha: float,
    lam: float,
    t0: float = 0.0,
    T: float = 2.0,
    y0: float | Sequence[float] = 1.0,
) -> FdeProblem:
    """Scalar linear test problem D^alpha y = lam * y.

    ``y0`` holds the m = ceil(alpha) initial derivative values; a bare
    scalar is accepted when m = 1.
    """
    validate_order(alpha)
    lam = float(lam)
    vals = np.atleast_1d(np.asarray(y0, dtype=float))
    initial = tuple(np.array([v]) for v in vals)

    def f(t, y):
        return lam * y

    def jacobian(t, y):
        return np.array([[lam]])

    return FdeProblem(
        alpha=alpha, t0=float(t0), T=float(T), y0=initial, f=f, q=1, jacobian=jacobian
    )


def make_brusselator(
    alpha: float,
    a: float = 1.0,
    mu: float = 4.0,
    y0: Sequence[float] = (1.2, 2.8),
    t0: float = 0.0,
    T: float = 50.0,
) -> FdeProblem:
    """Fractional Brusselator reaction system, steady state at (a, mu/a).

    The default initial state sits near but off the steady state; with
    alpha = 0.8 and (a, mu) = (1, 4) the trajectory approaches a stable
    limit cycle.
    """
    validate_order(alpha)
    a, mu = float(a), float(mu)
    x0 = np.asarray(y0, dtype=float)
    if x0.shape != (2,):
        raise ValueError("Brusselator initial state must have two components")

    def f(t, y):
        x1, x2 = y
        return np.array(
            [a - (mu + 1.0) * x1 + x1**2 * x2, mu * x1 - x1**2 * x2]
        )

    def jacobian(t, y):
        x1, x2 = y
        return np.array(
            [
                [-(mu + 1.0) + 2.0 * x1 * x2, x1**2],
                [mu - 2.0 * x1 * x2, -(x1**2)],
            ]
        )

    return FdeProblem(
        alpha=alpha, t0=float(t0), T=float(T), y0=(x0,), f=f, q=2, jacobian=jacobian
    )


def brusselator_steady_state(a: float = 1.0, mu: float = 4.0) -> np.ndarray:
    return np.array([a, mu / a])
