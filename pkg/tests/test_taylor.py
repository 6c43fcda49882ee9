import numpy as np
import pytest

from oplearn import taylor
from oplearn.taylor import Series, cos, exp, sin, sqrt, variable


def test_polynomial_derivatives_exact():
    x = variable(2.0, 3)
    s = x * x * x - 4.0 * x + 1.0
    assert s.c[0] == 1.0  # 8 - 8 + 1
    assert s.deriv(1) == 8.0  # 3x^2 - 4
    assert s.deriv(2) == 12.0  # 6x
    assert s.deriv(3) == 6.0


def test_elementary_functions_match_closed_forms():
    x0 = 0.7
    x = variable(x0, 3)
    s = exp(x)
    for k in range(4):
        assert s.deriv(k) == pytest.approx(np.exp(x0), rel=1e-14)
    s = sin(x)
    assert s.deriv(1) == pytest.approx(np.cos(x0), rel=1e-14)
    assert s.deriv(2) == pytest.approx(-np.sin(x0), rel=1e-14)
    assert s.deriv(3) == pytest.approx(-np.cos(x0), rel=1e-14)
    s = cos(x)
    assert s.deriv(1) == pytest.approx(-np.sin(x0), rel=1e-14)
    s = sqrt(x)
    assert s.deriv(1) == pytest.approx(0.5 * x0**-0.5, rel=1e-14)
    assert s.deriv(2) == pytest.approx(-0.25 * x0**-1.5, rel=1e-14)


def test_division_and_reciprocal():
    x = variable(1.3, 3)
    s = 1.0 / (1.0 + x * x)
    x0 = 1.3
    d1 = -2 * x0 / (1 + x0**2) ** 2
    assert s.deriv(1) == pytest.approx(d1, rel=1e-13)
    # s * (1/s) == 1 as a series
    prod = s * (1.0 / s)
    assert prod.c[0] == pytest.approx(1.0, rel=1e-14)
    for k in range(1, 4):
        assert abs(prod.c[k]) < 1e-14


def test_composition_chain_rule():
    x0 = 0.4
    x = variable(x0, 3)
    s = exp(-x * x) * cos(x)  # generic smooth composite
    f = lambda y: np.exp(-y * y) * np.cos(y)
    h = 1e-5
    fd1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
    fd2 = (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h**2
    assert s.deriv(1) == pytest.approx(fd1, rel=1e-9)
    assert s.deriv(2) == pytest.approx(fd2, rel=1e-5)


def test_array_coefficients_vectorize():
    xs = np.linspace(-2, 2, 11)
    s = sin(variable(xs, 2))
    assert np.allclose(s.c[0], np.sin(xs))
    assert np.allclose(s.deriv(1), np.cos(xs))
    assert np.allclose(s.deriv(2), -np.sin(xs))


def test_complex_sqrt_principal_branch():
    zeta = 0.3
    t = variable(0.5, 2)
    s = sqrt(zeta + 1j * t)
    z0 = zeta + 0.5j
    assert s.c[0] == pytest.approx(np.sqrt(z0))
    # d/dt sqrt(zeta + i t) = i / (2 sqrt(zeta + i t))
    assert s.deriv(1) == pytest.approx(1j / (2 * np.sqrt(z0)), rel=1e-13)


def test_numpy_does_not_swallow_series():
    xs = np.array([1.0, 2.0])
    s = xs - variable(0.0, 2)  # ndarray op Series must yield a Series
    assert isinstance(s, Series)
    assert np.allclose(s.c[0], xs)
    assert np.allclose(s.c[1], -1.0)


def test_mixed_orders_rejected():
    with pytest.raises(ValueError):
        variable(0.0, 2) + variable(0.0, 3)


def test_integer_powers():
    x = variable(1.5, 3)
    assert (x**3).deriv(2) == pytest.approx(9.0, rel=1e-14)  # 6x at 1.5
    with pytest.raises(ValueError):
        x**-1
    with pytest.raises(ValueError):
        x**0.5
