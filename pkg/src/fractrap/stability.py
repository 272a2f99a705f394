"""Linear stability: sectors, boundary loci, and sector-inclusion verdicts.

For the linear test equation the continuous solution decays exactly when
lambda sits in the sector |arg| > alpha*pi/2; the numerical stability
region is the complement of {1/omega_alpha(xi) : |xi| <= 1}, so sampling
1/omega_alpha on the unit circle traces its boundary.  A method keeps the
fractional analogue of A-stability when no boundary sample intrudes into
the sector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import MethodKind
from .weights import pi_uniform_weights

logger = logging.getLogger(__name__)

#: truncation length for the numerically-approximated PI generating function
PIU_TRUNCATION = 8192

_ARG_TOL = 1e-9


@dataclass(frozen=True)
class GeneratingFunction:
    """Evaluator for omega_alpha(xi) on the closed unit disk."""

    method: MethodKind
    alpha: float
    evaluator: Callable[[np.ndarray], np.ndarray]


@dataclass
class StabilityBoundary:
    """Sampled locus 1/omega_alpha(e^{i theta}) with the inclusion verdict."""

    theta: np.ndarray
    points: np.ndarray
    alpha: float
    method: MethodKind
    sector_included: bool


def generating_function(
    method: MethodKind | str, alpha: float, n_trunc: int = PIU_TRUNCATION
) -> GeneratingFunction:
    """Closed-form evaluator for FT/NG/FBDF, truncated series for PIU."""
    method = MethodKind(method)
    if method is MethodKind.FT:
        def ev(xi):
            return ((1.0 + xi) / (2.0 * (1.0 - xi))) ** alpha
    elif method is MethodKind.NG:
        def ev(xi):
            return (1.0 - 0.5 * alpha * (1.0 - xi)) * (1.0 - xi) ** (-alpha)
    elif method is MethodKind.FBDF:
        def ev(xi):
            return (2.0 / (3.0 * (1.0 - 4.0 * xi / 3.0 + xi**2 / 3.0))) ** alpha
    elif method in (MethodKind.PIU, MethodKind.PIG):
        # the graded rule has no convolution structure of its own; its
        # uniform limit (grading exponent 1) shares the PIU weights, so
        # both map to the same generating function.  Summing the weight
        # series b_n xi^n against Li_{-(alpha+1)} gives the closed form
        #   omega(xi) = (1-xi)^2 Li_{-(alpha+1)}(xi) / (xi Gamma(alpha+2)),
        # needed because the series itself diverges on |xi| = 1 once
        # alpha > 1.  On the circle the polylog comes from the Hurwitz
        # zeta function; strictly inside, the truncated series converges.
        _, b = pi_uniform_weights(alpha, n_trunc)
        coeffs = b / math.gamma(alpha + 2.0)
        gamma_a2 = math.gamma(alpha + 2.0)

        def ev(xi):
            xi = np.asarray(xi, dtype=complex)
            out = np.empty(xi.shape, dtype=complex)
            on_circle = np.abs(np.abs(xi) - 1.0) < 1e-13
            inner = ~on_circle
            if np.any(inner):
                out[inner] = np.polynomial.polynomial.polyval(
                    xi[inner], coeffs
                )
            if np.any(on_circle):
                z = xi[on_circle]
                li = _polylog_unit_circle(-(alpha + 1.0), np.angle(z))
                out[on_circle] = (1.0 - z) ** 2 * li / (z * gamma_a2)
            return out
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"no generating function for {method}")
    return GeneratingFunction(method, alpha, ev)


def _polylog_unit_circle(s: float, theta: np.ndarray) -> np.ndarray:
    """Li_s(e^{i theta}) for non-integer s < 0 and theta != 0 (mod 2 pi).

    Uses the Hurwitz formula Li_s(e^{2 pi i x}) = Gamma(1-s)/(2 pi)^{1-s}
    (i^{1-s} zeta(1-s, x) + i^{s-1} zeta(1-s, 1-x)) with 0 < x < 1.
    """
    from scipy.special import zeta as hurwitz_zeta

    x = np.mod(np.asarray(theta, dtype=float), 2.0 * math.pi) / (2.0 * math.pi)
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise ValueError("polylog continuation needs theta away from 0 mod 2*pi")
    oms = 1.0 - s
    pref = math.gamma(oms) / (2.0 * math.pi) ** oms
    rot = np.exp(1j * math.pi * oms / 2.0)
    return pref * (
        rot * hurwitz_zeta(oms, x) + np.conj(rot) * hurwitz_zeta(oms, 1.0 - x)
    )


def sector_contains(lam: complex, alpha: float) -> bool:
    """True iff lam lies in the open stability sector |arg| > alpha*pi/2."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if lam == 0:
        return False
    return abs(np.angle(lam)) > alpha * math.pi / 2.0


def boundary_locus(gf: GeneratingFunction, n_theta: int = 1024) -> StabilityBoundary:
    """Sample 1/omega_alpha around the unit circle, skipping theta = 0.

    Non-finite samples (poles or zeros of the generating function on the
    circle) are dropped and logged, not interpolated over.
    """
    if n_theta < 64:
        raise ValueError("need at least 64 boundary samples")
    k = np.arange(1, n_theta)
    theta = 2.0 * math.pi * k / n_theta
    xi = np.exp(1j * theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        points = 1.0 / gf.evaluator(xi)
    finite = np.isfinite(points)
    dropped = int(np.sum(~finite))
    if dropped:
        logger.info(
            "dropped %d non-finite boundary sample(s) for %s, alpha=%g",
            dropped,
            gf.method.value,
            gf.alpha,
        )
    theta, points = theta[finite], points[finite]
    included = not _any_inside_sector(points, gf.alpha)
    return StabilityBoundary(theta, points, gf.alpha, gf.method, included)


def _any_inside_sector(points: np.ndarray, alpha: float) -> bool:
    return bool(
        np.any(np.abs(np.angle(points)) > alpha * math.pi / 2.0 + _ARG_TOL)
    )


def a_alpha_stable(
    gf: GeneratingFunction, n_theta: int = 1024, n_grid: int = 0
) -> bool:
    """Whether the whole sector is contained in the stability region.

    The verdict comes from the boundary locus alone; ``n_grid > 0`` adds a
    paranoid sweep over interior circles |xi| = rho as a cross-check.
    """
    verdict = boundary_locus(gf, n_theta).sector_included
    if verdict and n_grid > 0:
        theta = 2.0 * math.pi * np.arange(1, n_theta) / n_theta
        for i in range(1, n_grid + 1):
            rho = i / (n_grid + 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                pts = 1.0 / gf.evaluator(rho * np.exp(1j * theta))
            pts = pts[np.isfinite(pts)]
            if _any_inside_sector(pts, gf.alpha):
                return False
    return verdict


def boundary_csv_lines(boundary: StabilityBoundary) -> list[str]:
    """CSV serialization: metadata header plus theta, re, im columns."""
    lines = [
        f"# method={boundary.method.value}",
        f"# alpha={boundary.alpha!r}",
        f"# sector_included={str(boundary.sector_included).lower()}",
        "theta,re,im",
    ]
    for th, p in zip(boundary.theta, boundary.points):
        lines.append(f"{th:.17g},{p.real:.17g},{p.imag:.17g}")
    return lines
