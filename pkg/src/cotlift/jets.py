"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` carries the value of a scalar function together with all of
its partial derivatives up to a fixed truncation order ``K`` (1 to 3) in a
fixed number of variables ``d``.  Arithmetic on jets is the arithmetic of
truncated Taylor expansions, so evaluating a composite function on seeded
jets yields exact (up to roundoff) mixed partial derivatives of the
composite, with no truncation error from stepping.

Coefficients are stored in the Taylor convention: the table entry for a
multi-index ``alpha`` is ``d^alpha f / alpha!``.  The entry for the zero
multi-index is the plain value of ``f``.  Multi-indices are enumerated in
graded lexicographic order, so truncating a table to a lower order is a
prefix slice.

The per-``(d, K)`` multiplication tables are precomputed once and shared;
jets themselves are immutable values, safe to use from several threads.
"""

from __future__ import annotations

import math
import numbers
from functools import lru_cache

import numpy as np

MAX_ORDER = 3


class JetError(ValueError):
    """Malformed jet construction or use."""


class JetShapeError(JetError):
    """Arithmetic between jets over different (d, K) rings."""


class JetDomainError(JetError):
    """Elementary function applied outside its domain."""


def _grade(d: int, total: int) -> list[tuple[int, ...]]:
    """All d-tuples of nonnegative integers summing to ``total``, lexicographic."""
    if d == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in _grade(d - 1, total - first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def _tables(d: int, K: int):
    """Shared index tables for the (d, K) ring.

    Returns ``(monomials, position, product_triples, factorials)`` where
    ``product_triples`` is three integer arrays (I, J, T) listing every pair
    of table slots whose product lands inside the truncation, and
    ``factorials`` holds ``alpha!`` per slot (for derivative extraction).
    """
    monomials: list[tuple[int, ...]] = []
    for total in range(K + 1):
        monomials.extend(_grade(d, total))
    position = {alpha: i for i, alpha in enumerate(monomials)}

    src_a, src_b, target = [], [], []
    for i, a in enumerate(monomials):
        da = sum(a)
        for j, b in enumerate(monomials):
            if da + sum(b) <= K:
                src_a.append(i)
                src_b.append(j)
                target.append(position[tuple(x + y for x, y in zip(a, b))])

    factorials = np.array(
        [math.prod(math.factorial(a) for a in alpha) for alpha in monomials],
        dtype=float,
    )
    return (
        tuple(monomials),
        position,
        (np.asarray(src_a), np.asarray(src_b), np.asarray(target)),
        factorials,
    )


def table_size(d: int, K: int) -> int:
    """Number of coefficients: C(d + K, K)."""
    return math.comb(d + K, K)


class Jet:
    """Element of the truncated Taylor ring in ``d`` variables at order ``K``.

    Construct through :meth:`constant` and :meth:`variable`; arithmetic and
    the elementary functions (``sin`` ... ``sqrt``) produce new jets.  Mixing
    jets of different ``(d, K)`` raises :class:`JetShapeError`.
    """

    __slots__ = ("d", "K", "coeffs")

    def __init__(self, d: int, K: int, coeffs) -> None:
        if d < 1:
            raise JetError(f"need at least one variable, got d={d}")
        if not 0 <= K <= MAX_ORDER:
            raise JetError(f"truncation order must be in 0..{MAX_ORDER}, got {K}")
        arr = np.asarray(coeffs, dtype=float)
        if arr.shape != (table_size(d, K),):
            raise JetError(
                f"coefficient table for (d={d}, K={K}) must have length "
                f"{table_size(d, K)}, got {arr.shape}"
            )
        self.d = d
        self.K = K
        self.coeffs = arr
        arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def constant(cls, value: float, d: int, K: int) -> "Jet":
        c = np.zeros(table_size(d, K))
        c[0] = value
        return cls(d, K, c)

    @classmethod
    def variable(cls, i: int, value: float, d: int, K: int) -> "Jet":
        """Seed coordinate ``i`` at base value ``value``."""
        if not 1 <= K <= MAX_ORDER:
            raise JetError(f"seed order must be in 1..{MAX_ORDER}, got {K}")
        if not 0 <= i < d:
            raise JetError(f"variable index {i} out of range for {d} variables")
        c = np.zeros(table_size(d, K))
        c[0] = value
        c[1 + i] = 1.0  # grade-1 block follows the constant slot, lexicographic
        return cls(d, K, c)

    # -- inspection --------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def partial(self, alpha) -> float:
        """The derivative d^alpha f, i.e. alpha! times the stored coefficient."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.d or any(a < 0 for a in alpha):
            raise JetError(f"bad multi-index {alpha} for d={self.d}")
        if sum(alpha) > self.K:
            raise JetError(f"|{alpha}| exceeds truncation order {self.K}")
        _, position, _, factorials = _tables(self.d, self.K)
        pos = position[alpha]
        return float(self.coeffs[pos] * factorials[pos])

    def truncate(self, K: int) -> "Jet":
        if K > self.K:
            raise JetError(f"cannot extend order {self.K} jet to order {K}")
        if K == self.K:
            return self
        return Jet(self.d, K, self.coeffs[: table_size(self.d, K)])

    def derivative(self, i: int) -> "Jet":
        """Jet of df/dx_i, one order lower than self."""
        if self.K < 1:
            raise JetError("cannot differentiate an order-0 jet")
        if not 0 <= i < self.d:
            raise JetError(f"variable index {i} out of range for {self.d} variables")
        position = _tables(self.d, self.K)[1]
        out_monomials = _tables(self.d, self.K - 1)[0]
        c = np.empty(len(out_monomials))
        for pos, alpha in enumerate(out_monomials):
            shifted = list(alpha)
            shifted[i] += 1
            c[pos] = self.coeffs[position[tuple(shifted)]] * shifted[i]
        return Jet(self.d, self.K - 1, c)

    def __repr__(self) -> str:
        return f"Jet(d={self.d}, K={self.K}, value={self.value!r})"

    # -- ring arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.d != self.d or other.K != self.K:
                raise JetShapeError(
                    f"cannot combine jets over (d={self.d}, K={self.K}) and "
                    f"(d={other.d}, K={other.K})"
                )
            return other
        if isinstance(other, numbers.Real):
            return Jet.constant(float(other), self.d, self.K)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Jet(self.d, self.K, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Jet(self.d, self.K, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Jet(self.d, self.K, other.coeffs - self.coeffs)

    def __neg__(self):
        return Jet(self.d, self.K, -self.coeffs)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        src_a, src_b, target = _tables(self.d, self.K)[2]
        c = np.bincount(
            target,
            weights=self.coeffs[src_a] * other.coeffs[src_b],
            minlength=len(self.coeffs),
        )
        return Jet(self.d, self.K, c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other._reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self._reciprocal()

    def __pow__(self, exponent):
        if isinstance(exponent, numbers.Integral):
            return self._int_pow(int(exponent))
        if isinstance(exponent, numbers.Real):
            return self._real_pow(float(exponent))
        return NotImplemented

    def _int_pow(self, e: int) -> "Jet":
        if e < 0:
            return self._int_pow(-e)._reciprocal()
        result = Jet.constant(1.0, self.d, self.K)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _real_pow(self, r: float) -> "Jet":
        v = self.value
        if v <= 0.0:
            raise JetDomainError(f"real power requires a positive base, got {v}")
        coeffs = [v**r]
        fall = 1.0
        for m in range(1, self.K + 1):
            fall *= (r - m + 1) / m
            coeffs.append(fall * v ** (r - m))
        return self._compose(coeffs)

    def _reciprocal(self) -> "Jet":
        v = self.value
        if v == 0.0:
            raise JetDomainError("division by a jet with zero value")
        return self._compose([(-1.0) ** m / v ** (m + 1) for m in range(self.K + 1)])

    # -- elementary functions ------------------------------------------------

    def _compose(self, series: list[float]) -> "Jet":
        """Substitute the zero-value part of self into a univariate Taylor series.

        ``series[m]`` must be f^(m)(value)/m!.  Horner evaluation in the
        truncated ring; exact because the argument has no constant term.
        """
        dx_coeffs = self.coeffs.copy()
        dx_coeffs[0] = 0.0
        dx = Jet(self.d, self.K, dx_coeffs)
        result = Jet.constant(series[self.K], self.d, self.K)
        for m in range(self.K - 1, -1, -1):
            result = result * dx + series[m]
        return result

    def sin(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._compose([s, c, -s / 2.0, -c / 6.0][: self.K + 1])

    def cos(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._compose([c, -s, -c / 2.0, s / 6.0][: self.K + 1])

    def tan(self) -> "Jet":
        t = math.tan(self.value)
        u = 1.0 + t * t
        return self._compose([t, u, t * u, u * (1.0 / 3.0 + t * t)][: self.K + 1])

    def sinh(self) -> "Jet":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._compose([s, c, s / 2.0, c / 6.0][: self.K + 1])

    def cosh(self) -> "Jet":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._compose([c, s, c / 2.0, s / 6.0][: self.K + 1])

    def exp(self) -> "Jet":
        e = math.exp(self.value)
        return self._compose([e, e, e / 2.0, e / 6.0][: self.K + 1])

    def log(self) -> "Jet":
        v = self.value
        if v <= 0.0:
            raise JetDomainError(f"log of a nonpositive value {v}")
        series = [math.log(v), 1.0 / v, -1.0 / (2.0 * v * v), 1.0 / (3.0 * v**3)]
        return self._compose(series[: self.K + 1])

    def sqrt(self) -> "Jet":
        v = self.value
        if v <= 0.0:
            raise JetDomainError(f"sqrt of a nonpositive value {v}")
        r = math.sqrt(v)
        series = [r, 1.0 / (2.0 * r), -1.0 / (8.0 * v * r), 1.0 / (16.0 * v * v * r)]
        return self._compose(series[: self.K + 1])
