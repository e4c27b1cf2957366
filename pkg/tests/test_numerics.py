import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigner_aah.numerics import (
    DomainError,
    IntegrationError,
    erf,
    erf_difference,
    erfc,
    erfcx,
    gauss_legendre,
    hermite,
    hermite_table,
    rk4_integrate,
    trapezoid_2d,
)


def maclaurin_erf(z, terms=80):
    # 2/sqrt(pi) * sum (-1)^n z^(2n+1) / (n! (2n+1))
    total, term = 0.0, z
    for n in range(terms):
        total += term / (2 * n + 1)
        term *= -z * z / (n + 1)
    return 2.0 / math.sqrt(math.pi) * total


def asymptotic_erfcx(z, terms=8):
    # 1/(z sqrt(pi)) * sum (-1)^n (2n-1)!! / (2 z^2)^n
    total, term = 0.0, 1.0
    for n in range(terms):
        total += term
        term *= -(2 * n + 1) / (2 * z * z)
    return total / (z * math.sqrt(math.pi))


@pytest.mark.parametrize("z", [-2.0, -0.7, -0.1, 0.0, 0.05, 0.5, 1.3, 2.5])
def test_erf_matches_maclaurin(z):
    assert erf(z) == pytest.approx(maclaurin_erf(z), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("z", [10.0, 20.0, 50.0, 200.0])
def test_erfcx_matches_asymptotic_tail(z):
    assert erfcx(z) == pytest.approx(asymptotic_erfcx(z), rel=1e-12)


def test_erfcx_negative_argument_grows():
    z = -3.0
    assert erfcx(z) == pytest.approx(math.exp(z * z) * (2 - math.erfc(-z)), rel=1e-14)


def test_erf_array_and_erfc_complement():
    z = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(erf(z) + erfc(z), 1.0, rtol=0, atol=1e-15)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_arguments_raise(bad):
    for fn in (erf, erfc, erfcx):
        with pytest.raises(DomainError):
            fn(bad)
    with pytest.raises(DomainError):
        erf(np.array([0.0, bad]))


@pytest.mark.parametrize("u,v", [(6.5, 6.0), (-6.0, -6.5), (0.3, -0.2), (12.0, 11.0)])
def test_erf_difference_in_tails(u, v):
    ref = mpmath.erfc(v) - mpmath.erfc(u)
    assert erf_difference(u, v) == pytest.approx(float(ref), rel=1e-13)


EXPLICIT = {
    0: lambda y: 1.0,
    1: lambda y: 2 * y,
    2: lambda y: 4 * y**2 - 2,
    3: lambda y: 8 * y**3 - 12 * y,
    4: lambda y: 16 * y**4 - 48 * y**2 + 12,
    5: lambda y: 32 * y**5 - 160 * y**3 + 120 * y,
}


@pytest.mark.parametrize("n", sorted(EXPLICIT))
@pytest.mark.parametrize("y", [-1.7, -0.3, 0.0, 0.8, 2.2])
def test_hermite_explicit_low_orders(n, y):
    assert hermite(n, y) == pytest.approx(EXPLICIT[n](y), rel=1e-14, abs=1e-12)


def test_hermite_high_order_against_mpmath():
    for n in (17, 33, 65):
        for y in (-2.0, 0.4, 3.1):
            assert hermite(n, y) == pytest.approx(float(mpmath.hermite(n, y)), rel=1e-11)


def test_hermite_table_matches_single_orders():
    table = hermite_table(12, 0.7)
    assert len(table) == 13
    for n, value in enumerate(table):
        assert value == pytest.approx(hermite(n, 0.7), rel=1e-15)


def test_hermite_negative_order_rejected():
    with pytest.raises(ValueError):
        hermite(-1, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 30), st.floats(-4, 4))
def test_hermite_parity(n, y):
    assert hermite(n, -y) == pytest.approx((-1) ** n * hermite(n, y), rel=1e-12, abs=1e-9)


def test_rk4_fourth_order_convergence():
    # harmonic oscillator, exact solution (cos t, -sin t)
    def field(x, k):
        return k, -x

    errs = []
    for h in (0.1, 0.05):
        out = rk4_integrate(field, (1.0, 0.0), h, int(round(2.0 / h)))
        errs.append(math.hypot(out[-1, 0] - math.cos(2.0), out[-1, 1] + math.sin(2.0)))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(4.0, abs=0.2)


def test_rk4_shape_and_start():
    out = rk4_integrate(lambda x, k: (1.0, 0.0), (0.5, 2.0), 0.1, 10)
    assert out.shape == (11, 2)
    assert tuple(out[0]) == (0.5, 2.0)
    assert out[-1, 0] == pytest.approx(1.5)


def test_rk4_blowup_raises_with_step_index():
    with pytest.raises(IntegrationError) as info:
        rk4_integrate(lambda x, k: (x * x, 0.0), (1.0, 0.0), 0.1, 100)
    assert info.value.step_index > 0


def test_trapezoid_2d_polynomial_and_gaussian():
    val = trapezoid_2d(lambda X, K: X * X + K, (0, 1), (0, 2), 401, 401)
    assert val == pytest.approx(2.0 / 3.0 + 2.0, rel=1e-5)
    g = trapezoid_2d(lambda X, K: np.exp(-(X**2 + K**2)) / math.pi, (-8, 8), (-8, 8), 161, 161)
    assert g == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        trapezoid_2d(lambda X, K: X, (0, 1), (0, 1), 1, 5)


def test_gauss_legendre_exact_for_polynomials():
    nodes, weights = gauss_legendre(12)
    assert sum(weights) == pytest.approx(2.0, rel=1e-14)
    assert sum(wt * s**22 for s, wt in zip(nodes, weights)) == pytest.approx(2.0 / 23.0, rel=1e-13)
