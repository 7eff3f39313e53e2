"""Rational functions in x over Q(q), with sigma_q and the derivation x d/dx.

Elements are stored as a pair of coprime polynomials in Q[q, x]
(``flint.fmpq_mpoly`` in the shared context ``CTX`` with generators x, q and
lex order x > q).  The denominator is scaled so that its leading coefficient
in that order is 1: its highest x-power carries a monic polynomial in q.
Dividing through by that q-polynomial gives the "monic in x over Q(q)" form;
both are canonical, and equality is representation equality.
"""

import re
from fractions import Fraction

import flint

from ..errors import DivisionByZero
from .polyq import PolyQ, RatQ, format_terms, to_fmpq, to_fraction

CTX = flint.fmpq_mpoly_ctx.get(("x", "q"), "lex")
X, Q = CTX.gens()
ONE = CTX.from_dict({(0, 0): 1})
ZERO = CTX.from_dict({})

_SCALARS = (int, Fraction, flint.fmpq, flint.fmpz)


def mpoly_from_polyq(p: PolyQ):
    """Embed a polynomial in q into CTX."""
    return CTX.from_dict({(0, k): c for k, c in enumerate(p.coeffs()) if c != 0})


def mpoly_x_coeffs(p) -> list:
    """Coefficients of p as a polynomial in x, each a PolyQ in q (index = x-degree)."""
    if p.is_zero():
        return []
    buckets = {}
    for (ex, eq), c in p.to_dict().items():
        buckets.setdefault(ex, {})[eq] = c
    dx = max(buckets)
    out = []
    for ex in range(dx + 1):
        terms = buckets.get(ex)
        if not terms:
            out.append(PolyQ([]))
            continue
        coeffs = [0] * (max(terms) + 1)
        for eq, c in terms.items():
            coeffs[eq] = c
        out.append(PolyQ(coeffs))
    return out


def deg_x(p) -> int:
    if p.is_zero():
        return -1
    return p.degrees()[0]


_ATOM = re.compile(r"[a-z]+(\^\d+)?")


def format_mpoly(p, qname="q") -> str:
    """Print a polynomial in x, q in the expression grammar (x-degree descending)."""
    terms = []
    for (ex, eq), c in p.terms():
        mono = {}
        if eq:
            mono[qname] = eq
        if ex:
            mono["x"] = ex
        terms.append((to_fraction(c), mono))
    return format_terms(terms)


def _substitute_x_scaled(p, s: int):
    """p(x / q^s) * q^(s * deg_x p) for s > 0, a polynomial again."""
    dx = deg_x(p)
    return CTX.from_dict(
        {(ex, eq + s * (dx - ex)): c for (ex, eq), c in p.to_dict().items()}
    ), s * dx


class BivariateFraction:
    """Shared arithmetic for num/den pairs of polynomials in CTX.

    Subclasses define ``_normalize`` (canonical form) and ``_same_field``.
    """

    __slots__ = ("num", "den", "_hash")

    def _new(self, num, den):
        raise NotImplementedError

    def _lift(self, other):
        raise NotImplementedError

    def _same_field(self, other) -> bool:
        return True

    def _coerce(self, other):
        if isinstance(other, type(self)):
            if not self._same_field(other):
                raise ValueError("operands live in different fields")
            return other
        if isinstance(other, _SCALARS):
            return self._lift(other)
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return self._new(self.num + o.num, self.den)
        return self._new(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return self._new_normalized(-self.num, self.den)

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
        if o.den.is_one() and o.num.is_constant():
            return self._new_scaled(o.num)
        return self._new(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return self._new(self.den, self.num)

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
        result = self.one_like()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def _new_scaled(self, c):
        if c.is_zero():
            return self.zero_like()
        return self._new_normalized(self.num * c, self.den)

    def zero_like(self):
        return self._lift(0)

    def one_like(self):
        return self._lift(1)

    def is_constant_in_x(self) -> bool:
        return deg_x(self.num) <= 0 and deg_x(self.den) == 0

    def _format(self, qname="q") -> str:
        n = format_mpoly(self.num, qname)
        if self.den.is_one():
            return n
        d = format_mpoly(self.den, qname)
        # a sum needs parentheses on either side; a product only below the bar
        if " " in n:
            n = f"({n})"
        if not _ATOM.fullmatch(d):
            d = f"({d})"
        return f"{n}/{d}"


class RatFun(BivariateFraction):
    """Element of Q(q)(x)."""

    __slots__ = ()

    def __init__(self, num, den=None, _normalized=False):
        if isinstance(num, RatQ):
            num, den0 = mpoly_from_polyq(num.num), mpoly_from_polyq(num.den)
            den = den0 if den is None else den0 * den
        elif isinstance(num, _SCALARS):
            num = CTX.from_dict({(0, 0): to_fmpq(num)}) if num != 0 else ZERO
        if den is None:
            den = ONE
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    def _new(self, num, den):
        return RatFun(num, den)

    def _new_normalized(self, num, den):
        return RatFun(num, den, _normalized=True)

    def _lift(self, other):
        return RatFun(other)

    @classmethod
    def x(cls):
        return cls(X, _normalized=True)

    @classmethod
    def q(cls):
        return cls(Q, _normalized=True)

    @classmethod
    def from_ratq(cls, c: RatQ):
        return cls(c)

    def sigma(self, t: int = 1) -> "RatFun":
        """f(x) -> f(q^t x)."""
        if t == 0 or self.is_constant_in_x():
            return self
        if t > 0:
            scale = X * Q ** t
            return RatFun(self.num.compose(scale, Q), self.den.compose(scale, Q))
        s = -t
        n, dn = _substitute_x_scaled(self.num, s)
        d, dd = _substitute_x_scaled(self.den, s)
        # both sides were multiplied by different q-powers; rebalance
        if dn > dd:
            d = d * Q ** (dn - dd)
        elif dd > dn:
            n = n * Q ** (dd - dn)
        return RatFun(n, d)

    def derive(self) -> "RatFun":
        """x d/dx."""
        if self.is_constant_in_x():
            return self.zero_like()
        dn = self.num.derivative("x")
        dd = self.den.derivative("x")
        return RatFun(X * (dn * self.den - self.num * dd), self.den * self.den)

    def has_q(self) -> bool:
        return self.num.degrees()[1] > 0 or self.den.degrees()[1] > 0

    def to_ratq(self) -> RatQ:
        if not self.is_constant_in_x():
            raise ValueError(f"{self} depends on x")
        n = mpoly_x_coeffs(self.num)
        d = mpoly_x_coeffs(self.den)
        return RatQ(n[0] if n else PolyQ([]), d[0])

    def subs_q(self, a) -> "RatFun":
        """Substitute q = a (rational); DivisionByZero if the denominator vanishes."""
        a = to_fmpq(a)
        den = self.den.compose(X, CTX.from_dict({(0, 0): a}) if a != 0 else ZERO)
        if den.is_zero():
            raise DivisionByZero(f"{self} has a pole along q={a}")
        num = self.num.compose(X, CTX.from_dict({(0, 0): a}) if a != 0 else ZERO)
        return RatFun(num, den)

    def evaluate(self, x0, q0) -> Fraction:
        """Numeric value at (x, q) = (x0, q0), both rational."""
        point = [to_fmpq(x0), to_fmpq(q0)]
        d = self.den(*point)
        if d == 0:
            raise DivisionByZero(f"{self} has a pole at x={x0}, q={q0}")
        return to_fraction(self.num(*point) / d)

    def x_series(self, order: int) -> list:
        """Taylor coefficients at x = 0 (as RatQ) through x^order."""
        num = mpoly_x_coeffs(self.num)
        den = mpoly_x_coeffs(self.den)
        if den[0].is_zero():
            raise DivisionByZero(f"{self} has a pole at x=0")
        d0 = RatQ(den[0])
        ds = [RatQ(c) for c in den]
        out = []
        for k in range(order + 1):
            acc = RatQ(num[k]) if k < len(num) else RatQ(0)
            for i in range(1, min(k, len(ds) - 1) + 1):
                if not ds[i].is_zero():
                    acc = acc - ds[i] * out[k - i]
            out.append(acc / d0)
        return out

    def __str__(self):
        return self._format()

    def __repr__(self):
        return f"RatFun({self})"


def _normalize(num, den):
    if den.is_zero():
        raise DivisionByZero("zero denominator in Q(q)(x)")
    if num.is_zero():
        return ZERO, ONE
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def sigma_q(f: RatFun, t: int = 1) -> RatFun:
    return f.sigma(t)


def dlog_derive(f: RatFun) -> RatFun:
    return f.derive()
