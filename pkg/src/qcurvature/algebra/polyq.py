"""Univariate polynomials over Q (in q) and the field Q(q).

``PolyQ`` is ``flint.fmpq_poly``; this module adds the few helpers the rest of
the package needs on top of it, plus :class:`RatQ` for elements of Q(q).
"""

import re
from fractions import Fraction
from functools import lru_cache

import flint

from ..errors import DivisionByZero

PolyQ = flint.fmpq_poly


def to_fraction(c) -> Fraction:
    """Convert an fmpq/fmpz/int/Fraction or a "a/b" string to ``Fraction``."""
    if isinstance(c, (Fraction, str)):
        return Fraction(c)
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, flint.fmpz):
        return Fraction(int(c))
    return Fraction(int(c.p), int(c.q))


def to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq(c)


def poly_key(p: PolyQ) -> tuple:
    """Hashable, order-friendly key for a polynomial: (degree, coefficients)."""
    return (p.degree(), tuple(to_fraction(c) for c in p.coeffs()))


def monic(p: PolyQ) -> PolyQ:
    if p.is_zero():
        return p
    return p / p.leading_coefficient()


@lru_cache(maxsize=None)
def _cyclotomic_cached(n: int) -> PolyQ:
    num = PolyQ([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            quo, rem = divmod(num, _cyclotomic_cached(d))
            assert rem.is_zero()
            num = quo
    return num


def cyclotomic(n: int) -> PolyQ:
    """n-th cyclotomic polynomial, by dividing q^n - 1 by Phi_d for proper divisors d."""
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    # copy: fmpq_poly is mutable through in-place ops
    return PolyQ(_cyclotomic_cached(n))


def format_poly(p: PolyQ, var: str = "q") -> str:
    """Print in the expression grammar, highest degree first."""
    coeffs = [to_fraction(c) for c in p.coeffs()]
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        if coeffs[k]:
            terms.append((coeffs[k], {var: k} if k else {}))
    return format_terms(terms)


def format_terms(terms) -> str:
    """Join (coefficient, {var: exponent}) pairs into a grammar-conformant sum."""
    if not terms:
        return "0"
    out = []
    for i, (c, mono) in enumerate(terms):
        factors = []
        for var, e in mono.items():
            if e == 1:
                factors.append(var)
            elif e > 1:
                factors.append(f"{var}^{e}")
        mag = abs(c)
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_fmt_rational(mag)}*{body}"
        else:
            body = _fmt_rational(mag)
        if i == 0:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)


def _fmt_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class RatQ:
    """Element of Q(q) as num/den with gcd 1 and monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _normalized=False):
        if not isinstance(num, PolyQ):
            num = PolyQ([to_fmpq(num)])
        if den is None:
            den = PolyQ([1])
        elif not isinstance(den, PolyQ):
            den = PolyQ([to_fmpq(den)])
        if not _normalized:
            if den.is_zero():
                raise DivisionByZero("zero denominator in Q(q)")
            if num.is_zero():
                den = PolyQ([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = divmod(num, g)[0]
                    den = divmod(den, g)[0]
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def q(cls) -> "RatQ":
        return cls(PolyQ([0, 1]), _normalized=True)

    @classmethod
    def q_power(cls, k: int) -> "RatQ":
        mono = PolyQ([0] * abs(k) + [1])
        if k >= 0:
            return cls(mono, _normalized=True)
        return cls(PolyQ([1]), mono, _normalized=True)

    def zero_like(self):
        return RatQ(0)

    def one_like(self):
        return RatQ(1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_rational(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational constant")
        return to_fraction(self.num[0]) if not self.num.is_zero() else Fraction(0)

    def __call__(self, a):
        """Evaluate at q = a (a rational); raises DivisionByZero at a pole."""
        a = to_fmpq(a)
        d = self.den(a)
        if d == 0:
            raise DivisionByZero(f"{self} has a pole at q={a}")
        return to_fraction(self.num(a) / d)

    def _coerce(self, other):
        if isinstance(other, RatQ):
            return other
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return RatQ(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatQ(self.num + o.num, self.den)
        return RatQ(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatQ(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatQ(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatQ":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in Q(q)")
        return RatQ(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatQ(self.num ** k, self.den ** k, _normalized=True)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((poly_key(self.num), poly_key(self.den)))
        return self._hash

    def __str__(self):
        n = format_poly(self.num)
        if self.den.is_one():
            return n
        d = format_poly(self.den)
        if " " in n:
            n = f"({n})"
        if not re.fullmatch(r"q(\^\d+)?", d):
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatQ({self})"
