"""Truncated power series in one variable with complex coefficients.

Used to expand curve equations and differentials around a chart point so that
jets come out exact to series order instead of from finite differences.
"""
from __future__ import annotations

import numpy as np


class Series:
    """Power series ``sum_k c[k] z**k`` truncated after ``len(c)`` terms."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if order is not None:
            out = np.zeros(order, dtype=complex)
            n = min(order, c.size)
            out[:n] = c[:n]
            c = out
        self.c = c

    @property
    def order(self):
        return self.c.size

    @classmethod
    def const(cls, value, order):
        return cls([value], order)

    @classmethod
    def var(cls, order, value=0.0, scale=1.0):
        """The series ``value + scale*z``."""
        return cls([value, scale], order)

    def _coerce(self, other):
        if isinstance(other, Series):
            if other.order != self.order:
                raise ValueError("series orders differ")
            return other
        return Series.const(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return Series(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        other = self._coerce(other)
        return Series(self.c - other.c)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * complex(other))
        other = self._coerce(other)
        n = self.order
        return Series(np.convolve(self.c, other.c)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.c / complex(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)) and k >= 0:
            out = Series.const(1.0, self.order)
            base = self
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        if isinstance(k, (int, np.integer)):
            return (self ** (-k)).inverse()
        return self.power(k)

    def inverse(self):
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        n = self.order
        b = np.zeros(n, dtype=complex)
        b[0] = 1.0 / a[0]
        for k in range(1, n):
            b[k] = -np.dot(a[1:k + 1], b[k - 1::-1][:k]) / a[0]
        return Series(b)

    def power(self, p):
        """Principal branch ``self**p`` for real ``p``, normalised by ``c[0]**p``.

        Uses the J.C.P. Miller recurrence; the constant term must be nonzero.
        """
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("fractional power needs a nonzero constant term")
        n = self.order
        s = np.zeros(n, dtype=complex)
        s[0] = a[0] ** p
        for k in range(1, n):
            j = np.arange(1, k + 1)
            s[k] = np.sum((p * j - k + j) * a[j] * s[k - j]) / (k * a[0])
        return Series(s)

    def deriv(self):
        n = self.order
        d = np.zeros(n, dtype=complex)
        d[: n - 1] = self.c[1:] * np.arange(1, n)
        return Series(d)

    def shift_down(self, k):
        """Divide by ``z**k``; the first ``k`` coefficients must vanish.

        The top ``k`` coefficients of the result are unknown and set to zero,
        so callers should carry ``k`` spare terms.
        """
        if k == 0:
            return self
        n = self.order
        d = np.zeros(n, dtype=complex)
        d[: n - k] = self.c[k:]
        return Series(d)

    def shift_up(self, k):
        n = self.order
        d = np.zeros(n, dtype=complex)
        d[k:] = self.c[: n - k]
        return Series(d)

    def valuation(self, tol=0.0):
        nz = np.nonzero(np.abs(self.c) > tol)[0]
        return int(nz[0]) if nz.size else self.order

    def compose(self, inner: "Series") -> "Series":
        """``self(inner(z))`` for ``inner`` with zero constant term."""
        if inner.c[0] != 0:
            raise ValueError("inner series must have zero constant term")
        out = Series.const(0.0, inner.order)
        for coef in self.c[: inner.order][::-1]:
            out = out * inner + coef
        return out

    def reversion(self) -> "Series":
        """Compositional inverse of a series with ``c[0] = 0`` and ``c[1] != 0``."""
        if self.c[0] != 0 or self.c[1] == 0:
            raise ValueError("reversion needs c0 = 0 and c1 != 0")
        n = self.order
        inv = Series([0.0, 1.0 / self.c[1]], n)
        # Newton iteration on self(inv) = z; each step doubles the correct terms.
        z = Series.var(n)
        dself = self.deriv()
        k = 2
        while True:
            resid = self.compose(inv) - z
            inv = inv - resid / dself.compose(inv)
            if k >= n:
                break
            k *= 2
        return inv

    def derivatives(self, count=3):
        """Return ``[f(0), f'(0), f''(0), ...]`` (``count`` entries)."""
        fact = 1.0
        out = []
        for k in range(count):
            if k:
                fact *= k
            out.append(self.c[k] * fact if k < self.order else 0.0)
        return np.array(out, dtype=complex)

    def __call__(self, z):
        return np.polyval(self.c[::-1], z)

    def __repr__(self):
        return f"Series({np.array2string(self.c, precision=4)})"


def poly_at_series(coeffs, s: Series) -> Series:
    """Evaluate the polynomial with ascending ``coeffs`` at a series (Horner)."""
    out = Series.const(0.0, s.order)
    for c in np.asarray(coeffs, dtype=complex)[::-1]:
        out = out * s + c
    return out
