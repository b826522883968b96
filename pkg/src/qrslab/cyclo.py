"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Values are kept as polynomials in zeta_n reduced modulo the n-th cyclotomic
polynomial, with Fraction coefficients.  Mixed orders are combined by lifting
to the lcm.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    # Divide x^n - 1 by the product of all lower cyclotomic factors.
    num = [0] * (n + 1)
    num[0] = -1
    num[n] = 1
    for d in range(1, n):
        if n % d == 0:
            num = _poly_div_exact(num, cyclotomic_polynomial(d))
    return tuple(num)


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    dlead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        assert c % dlead == 0
        q = c // dlead
        out[k] = q
        if q:
            for i, dc in enumerate(den):
                num[k + i] -= q * dc
    assert all(x == 0 for x in num)
    return out


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta_n^k for k in [0, n) expressed in the power basis of degree phi(n)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows: list[tuple[Fraction, ...]] = []
    # Powers below deg are basis vectors; higher ones reduce by the relation
    # zeta^deg = -(phi[0] + phi[1] zeta + ...)/phi[deg] (phi is monic).
    cur = [Fraction(0)] * deg
    for k in range(n):
        if k < deg:
            row = [Fraction(0)] * deg
            row[k] = Fraction(1)
            rows.append(tuple(row))
            cur = row
        else:
            # multiply previous row by zeta and reduce
            prev = rows[k - 1]
            row = [Fraction(0)] * deg
            for i in range(deg - 1):
                row[i + 1] += prev[i]
            top = prev[deg - 1]
            if top:
                for i in range(deg):
                    row[i] -= top * phi[i]
            rows.append(tuple(row))
    return tuple(rows)


class Cyc:
    """An element of Q(zeta_n), immutable."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        deg = len(cyclotomic_polynomial(order)) - 1
        c = tuple(Fraction(x) for x in coeffs)
        assert len(c) == deg
        self.coeffs = c

    # -- constructors ---------------------------------------------------
    @staticmethod
    def zero(order: int = 1) -> "Cyc":
        deg = len(cyclotomic_polynomial(order)) - 1
        return Cyc(order, [Fraction(0)] * deg)

    @staticmethod
    def from_fraction(x, order: int = 1) -> "Cyc":
        deg = len(cyclotomic_polynomial(order)) - 1
        coeffs = [Fraction(0)] * deg
        coeffs[0] = Fraction(x)
        return Cyc(order, coeffs)

    @staticmethod
    def root_of_unity(num: int, den: int) -> "Cyc":
        """exp(2*pi*i*num/den)."""
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = gcd(num % den, den) if num % den else den
        num, den = (num % den) // g, den // g
        table = _reduction_table(den)
        return Cyc(den, table[num % den])

    @staticmethod
    def exp_qz(q: Fraction) -> "Cyc":
        """exp(2*pi*i*q) for rational q."""
        q = Fraction(q)
        return Cyc.root_of_unity(q.numerator % q.denominator, q.denominator)

    # -- lifting ---------------------------------------------------------
    def lift(self, m: int) -> "Cyc":
        """Rewrite in Q(zeta_m); requires order | m."""
        if m == self.order:
            return self
        assert m % self.order == 0
        k = m // self.order
        table = _reduction_table(m)
        deg = len(cyclotomic_polynomial(m)) - 1
        out = [Fraction(0)] * deg
        for e, c in enumerate(self.coeffs):
            if c:
                row = table[(e * k) % m]
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return Cyc(m, out)

    def _pair(self, other: "Cyc") -> tuple["Cyc", "Cyc"]:
        m = self.order * other.order // gcd(self.order, other.order)
        return self.lift(m), other.lift(m)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        a, b = self._pair(other)
        return Cyc(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return Cyc(self.order, [x * f for x in self.coeffs])
        a, b = self._pair(_coerce(other))
        n = a.order
        table = _reduction_table(n)
        deg = len(a.coeffs)
        conv = [Fraction(0)] * (2 * deg - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        conv[i + j] += x * y
        out = list(conv[:deg]) + [Fraction(0)] * max(0, deg - len(conv))
        for e in range(deg, len(conv)):
            c = conv[e]
            if c:
                row = table[e % n]
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return Cyc(n, out[:deg])

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyc.from_fraction(other)
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        f = self.as_fraction()
        if f is not None:
            return hash(f)
        return hash((self.order, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_fraction(self) -> Fraction | None:
        """The value as a rational number, or None if irrational.

        The power-basis representation modulo the cyclotomic polynomial is
        unique, so rational values always sit in the constant coefficient.
        """
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def __repr__(self):
        if self.is_zero():
            return "Cyc(0)"
        parts = []
        for e, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}*z{self.order}^{e}" if e else f"{c}")
        return "Cyc(" + " + ".join(parts) + ")"


def _coerce(x) -> Cyc:
    if isinstance(x, Cyc):
        return x
    return Cyc.from_fraction(Fraction(x))


def cyclotomic_product(m: int) -> int:
    """Product of (1 - zeta) over primitive m-th roots of unity zeta, m >= 2.

    Computed exactly in Q(zeta_m); the result is a rational integer.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    acc = Cyc.from_fraction(1, order=1)
    one = Cyc.from_fraction(1)
    for j in range(1, m):
        if gcd(j, m) == 1:
            acc = acc * (one - Cyc.root_of_unity(j, m))
    f = acc.as_fraction()
    assert f is not None and f.denominator == 1
    return int(f)
