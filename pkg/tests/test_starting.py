"""Exponent sets and starting-weight systems."""

import math

import numpy as np
import pytest

from fractrap.starting import (
    MIN_ALPHA,
    exponent_set,
    starting_weight_table,
    starting_weights,
)
from fractrap.weights import convolution_weights


def test_exponent_set_half():
    E = exponent_set(0.5)
    np.testing.assert_allclose(E.exponents, [0.0, 0.5, 1.0])
    assert E.s == 2


def test_exponent_set_three_halves():
    E = exponent_set(1.5)
    np.testing.assert_allclose(E.exponents, [0.0, 1.0])


def test_exponent_set_generic_cardinality():
    for alpha in (0.3, 0.47, 0.9, 1.2):
        E = exponent_set(alpha)
        assert E.s_plus_1 == math.ceil(1.0 / alpha) + 1


def test_exponent_set_deduplicates():
    # alpha = 1/3: 3*alpha would hit 1.0 exactly and must not double up
    E = exponent_set(1.0 / 3.0)
    assert E.exponents[-1] == 1.0
    assert np.all(np.diff(E.exponents) > 1e-12)


def test_exponent_set_rejects_tiny_alpha():
    with pytest.raises(ValueError):
        exponent_set(MIN_ALPHA / 2)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.5])
def test_single_step_weights_make_quadrature_exact(alpha):
    E = exponent_set(alpha)
    om = convolution_weights("FT", alpha, 64).omega
    for n in (1, 2, 17, 64):
        sw = starting_weights(om, alpha, n, E)
        # the correction reaches index s even when n < s
        j = np.arange(max(n, E.s) + 1, dtype=float)
        for nu in E.exponents:
            g = j**nu
            quad = np.dot(om[n::-1], g[: n + 1]) + np.dot(sw.w, g[: E.s_plus_1])
            exact = math.gamma(nu + 1) / math.gamma(nu + 1 + alpha) * n ** (nu + alpha)
            assert quad == pytest.approx(exact, rel=1e-10, abs=1e-11)


def test_table_matches_single_step_solves():
    alpha = 0.5
    E = exponent_set(alpha)
    om = convolution_weights("NG", alpha, 300).omega
    table = starting_weight_table(om, alpha, 300, E)
    assert table.shape == (301, E.s_plus_1)
    np.testing.assert_allclose(table[0], 0.0)
    for n in (1, 2, 33, 150, 300):
        sw = starting_weights(om, alpha, n, E)
        np.testing.assert_allclose(table[n], sw.w, rtol=1e-8, atol=1e-10)


def test_starting_weights_input_validation():
    E = exponent_set(0.5)
    om = convolution_weights("FT", 0.5, 8).omega
    with pytest.raises(ValueError):
        starting_weights(om, 0.5, 0, E)
    with pytest.raises(ValueError):
        starting_weights(om, 0.5, 20, E)
    with pytest.raises(ValueError):
        starting_weight_table(om, 0.5, 20, E)
