import math

import mpmath
import numpy as np
import pytest

from helmdtn.special_functions import (
    MAX_ORDER,
    BesselDomainError,
    BesselOrderError,
    bessel_j,
    bessel_y,
    hankel1,
    hankel1_derivative,
    hankel_dtn_symbol,
)

XS = [1e-3, 0.1, 0.5, 1.0, 2.4048, 5.0, 10.0, 29.7, 30.0, 75.0, 240.0]


def series_j(n, x, terms=80):
    # ascending series, independent of any library Bessel routine
    total = mpmath.mpf(0)
    half = mpmath.mpf(x) / 2
    for k in range(terms):
        total += (-1) ** k * half ** (2 * k + n) / (mpmath.factorial(k) * mpmath.factorial(k + n))
    return float(total)


def test_reference_values():
    assert bessel_j(0, 1.0) == pytest.approx(0.76519768655796655, rel=1e-15)
    assert bessel_y(0, 1.0) == pytest.approx(0.08825696421567696, rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
@pytest.mark.parametrize("x", [0.1, 1.0, 4.0, 8.0])
def test_j_matches_power_series(n, x):
    with mpmath.workdps(40):
        ref = series_j(n, x)
    assert bessel_j(n, x) == pytest.approx(ref, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 20, 50])
def test_hankel_matches_mpmath(n):
    for x in XS:
        ref = complex(mpmath.hankel1(n, x))
        got = hankel1(n, x)
        assert abs(got - ref) <= 1e-12 * abs(ref), (n, x)


def test_wronskian():
    # J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)
    for n in range(0, 30):
        for x in XS[1:]:
            w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x)
            expected = 2.0 / (math.pi * x)
            scale = max(abs(bessel_j(n, x) * bessel_y(n + 1, x)), expected)
            assert abs(w - expected) <= 1e-10 * scale, (n, x)


def test_three_term_recurrence():
    # H_{n-1} + H_{n+1} = (2n/x) H_n
    for n in range(1, MAX_ORDER):
        for x in (0.7, 3.0, 30.0, 90.0):
            lhs = hankel1(n - 1, x) + hankel1(n + 1, x)
            rhs = 2 * n / x * hankel1(n, x)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs)), (n, x)


@pytest.mark.parametrize("n", [1, 2, 3, 8])
def test_reflection(n):
    x = np.array([0.3, 2.0, 17.0])
    assert np.allclose(bessel_j(-n, x), (-1) ** n * bessel_j(n, x), rtol=0, atol=0)
    assert np.allclose(bessel_y(-n, x), (-1) ** n * bessel_y(n, x), rtol=0, atol=0)
    assert np.allclose(hankel1(-n, x), (-1) ** n * hankel1(n, x), rtol=0, atol=0)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 10])
def test_derivative_against_finite_difference(n):
    h = 1e-5
    for x in (0.8, 3.0, 24.0):
        fd = (hankel1(n, x + h) - hankel1(n, x - h)) / (2 * h)
        assert abs(hankel1_derivative(n, x) - fd) <= 1e-7 * abs(fd)


def test_derivative_of_order_zero_is_minus_h1():
    x = np.linspace(0.5, 40, 17)
    assert np.array_equal(hankel1_derivative(0, x), -hankel1(1, x))


def test_dtn_symbol_against_mpmath():
    kappa, R = 8.0, 3.0
    for m in (0, 1, 2, 3, 10, 30, 50):
        z = kappa * R
        ref = kappa * complex(mpmath.diff(lambda t: mpmath.hankel1(m, t), z) / mpmath.hankel1(m, z))
        assert abs(hankel_dtn_symbol(m, kappa, R) - ref) <= 1e-11 * abs(ref)


def test_broadcasting_and_scalar_return():
    assert np.isscalar(hankel1(0, 1.0)) or np.ndim(hankel1(0, 1.0)) == 0
    x = np.linspace(1, 2, 6).reshape(2, 3)
    assert hankel1(2, x).shape == (2, 3)


def test_j_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


@pytest.mark.parametrize("fn", [bessel_y, hankel1, hankel1_derivative])
def test_singular_at_zero_rejected(fn):
    with pytest.raises(BesselDomainError):
        fn(0, 0.0)


def test_negative_and_nan_rejected():
    with pytest.raises(BesselDomainError):
        bessel_j(0, -1.0)
    with pytest.raises(BesselDomainError):
        hankel1(1, np.array([1.0, np.nan]))


@pytest.mark.parametrize("order", [0.5, "1", True, MAX_ORDER + 1, -(MAX_ORDER + 1)])
def test_bad_orders(order):
    with pytest.raises(BesselOrderError):
        hankel1(order, 1.0)


def test_large_argument_asymptotics():
    # |H_0(x)| ~ sqrt(2 / (pi x))
    x = 5000.0
    assert abs(hankel1(0, x)) == pytest.approx(math.sqrt(2 / (math.pi * x)), rel=1e-4)


def test_accuracy_grid_against_mpmath():
    xs = [1e-3, 0.01, 0.3, 1.0, 7.5, 20.0, 55.0, 120.0, 200.0]
    worst_j = worst_y = 0.0
    for n in (0, 1, 2, 3, 8, 16, 32, 64):
        for x in xs:
            worst_j = max(worst_j, abs(bessel_j(n, x) - float(mpmath.besselj(n, x))))
            ref = float(mpmath.bessely(n, x))
            worst_y = max(worst_y, abs(bessel_y(n, x) - ref) / max(1.0, abs(ref)))
    assert worst_j <= 1e-13
    assert worst_y <= 1e-12


def test_wronskian_derivative_form():
    # J_n Y_n' - J_n' Y_n = 2 / (pi x), with derivatives from the half-difference rule
    for n in range(0, 9):
        for x in np.geomspace(0.1, 100, 25):
            jd = 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x)) if n else -bessel_j(1, x)
            yd = 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x)) if n else -bessel_y(1, x)
            w = bessel_j(n, x) * yd - jd * bessel_y(n, x)
            assert w == pytest.approx(2 / (np.pi * x), rel=1e-10)


def test_y2_recurrence():
    for x in np.linspace(0.5, 100, 40):
        assert bessel_y(2, x) == pytest.approx(2 / x * bessel_y(1, x) - bessel_y(0, x), rel=1e-11, abs=1e-14)


def test_downward_recurrence_closure():
    # Miller's algorithm normalized by J_0 + 2 sum J_{2k} = 1, compared with direct values
    for x in (0.5, 5.0, 37.0, 100.0):
        top = int(x) + 80
        vals = np.zeros(top + 2)
        vals[top] = 1e-300
        for n in range(top, 0, -1):
            vals[n - 1] = 2 * n / x * vals[n] - vals[n + 1]
        vals /= vals[0] + 2 * vals[2::2].sum()
        for n in range(0, 20):
            direct = bessel_j(n, x)
            assert abs(vals[n] - direct) <= 1e-11 * max(abs(direct), 1e-3), (n, x)


def test_asymptotic_modulus_at_100():
    for m in (0, 1, 2, 3):
        assert abs(hankel1(m, 100.0)) == pytest.approx(math.sqrt(2 / (math.pi * 100)), rel=0.05)
