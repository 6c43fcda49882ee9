"""Truncated univariate Taylor-series arithmetic.

A :class:`Series` carries the Taylor coefficients ``c[k] = f^(k)(x0) / k!`` of
a function along one seed variable, truncated at a fixed order.  Propagating a
seeded series through a closed-form expression yields the exact derivatives of
that expression at the expansion point, up to roundoff; no numerical
differencing is involved.

Coefficients may be floats, complex numbers, or numpy arrays (for vectorized
evaluation over many expansion points at once).  The elementary functions use
the standard convolution recurrences, e.g. for ``y = exp(u)``:

    y_0 = exp(u_0),   y_k = (1/k) * sum_{j=1..k} j * u_j * y_{k-j}
"""

from __future__ import annotations

import numpy as np

__all__ = ["Series", "variable", "exp", "sin", "cos", "sqrt"]


class Series:
    """Taylor coefficients of a function of one seed variable."""

    __slots__ = ("c",)

    # Make ndarray <op> Series defer to the reflected Series methods instead
    # of numpy broadcasting over the object.
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.c = list(coeffs)
        if not self.c:
            raise ValueError("a Series needs at least the order-0 coefficient")

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def deriv(self, k: int):
        """k-th derivative at the expansion point (coefficient times k!)."""
        if k > self.order:
            raise ValueError(f"series truncated at order {self.order}, asked for {k}")
        fact = 1.0
        for j in range(2, k + 1):
            fact *= j
        return self.c[k] * fact

    # -- ring operations -------------------------------------------------

    def _coerce(self, other) -> list:
        if isinstance(other, Series):
            if len(other.c) != len(self.c):
                raise ValueError("mixed truncation orders")
            return other.c
        return [other] + [0.0] * self.order

    def __add__(self, other):
        oc = self._coerce(other)
        return Series([a + b for a, b in zip(self.c, oc)])

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._coerce(other)
        return Series([a - b for a, b in zip(self.c, oc)])

    def __rsub__(self, other):
        oc = self._coerce(other)
        return Series([b - a for a, b in zip(self.c, oc)])

    def __neg__(self):
        return Series([-a for a in self.c])

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([a * other for a in self.c])
        if len(other.c) != len(self.c):
            raise ValueError("mixed truncation orders")
        a, b = self.c, other.c
        n = len(a)
        return Series([sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other._reciprocal()
        return Series([a / other for a in self.c])

    def __rtruediv__(self, other):
        return other * self._reciprocal()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Series([1.0] + [0.0] * self.order)
        for _ in range(n):
            out = out * self
        return out

    def _reciprocal(self) -> "Series":
        b = self.c
        r = [1.0 / b[0]]
        for k in range(1, len(b)):
            r.append(-sum(b[j] * r[k - j] for j in range(1, k + 1)) / b[0])
        return Series(r)


def variable(x0, order: int) -> Series:
    """Seed series for the differentiation variable at expansion point x0."""
    one = np.ones_like(np.asarray(x0, dtype=np.result_type(x0, 1.0)))
    if one.ndim == 0:
        one = one[()]
    return Series([x0, one] + [0.0 * one] * (order - 1))


def exp(x):
    if not isinstance(x, Series):
        return np.exp(x)
    u = x.c
    y = [np.exp(u[0])]
    for k in range(1, len(u)):
        y.append(sum(j * u[j] * y[k - j] for j in range(1, k + 1)) / k)
    return Series(y)


def sin(x):
    if not isinstance(x, Series):
        return np.sin(x)
    return _sincos(x)[0]


def cos(x):
    if not isinstance(x, Series):
        return np.cos(x)
    return _sincos(x)[1]


def _sincos(x: Series):
    u = x.c
    s = [np.sin(u[0])]
    c = [np.cos(u[0])]
    for k in range(1, len(u)):
        s.append(sum(j * u[j] * c[k - j] for j in range(1, k + 1)) / k)
        c.append(-sum(j * u[j] * s[k - j] for j in range(1, k + 1)) / k)
    return Series(s), Series(c)


def sqrt(x):
    """Principal-branch square root; complex c[0] must avoid the cut at 0."""
    if not isinstance(x, Series):
        return np.sqrt(x)
    u = x.c
    y = [np.sqrt(u[0])]
    for k in range(1, len(u)):
        y.append((u[k] - sum(y[j] * y[k - j] for j in range(1, k))) / (2.0 * y[0]))
    return Series(y)
