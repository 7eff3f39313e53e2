"""Cyclotomic places of Q(q) and the residue fields Q(zeta_n), Q(zeta_n)(x).

Residues are represented by their canonical lift: a polynomial in q of degree
< deg Phi_n.  Polynomials over Q(zeta_n) in x share the (x, q) context of
:mod:`ratfun`, with q read as zeta_n.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import flint

from ..errors import BadReduction, DivisionByZero
from .modgcd import common_divisor
from .polyq import PolyQ, RatQ, format_poly, poly_key, to_fmpq
from .ratfun import (
    CTX, ONE, ZERO, X, Q, BivariateFraction, RatFun, _SCALARS, deg_x,
    format_mpoly, mpoly_from_polyq,
)

_ZCTX = flint.fmpz_mpoly_ctx.get(("x", "q"), "lex")


@dataclass(frozen=True, eq=False)
class CyclotomicPlace:
    n: int
    phi: PolyQ = field(repr=False)
    kappa: int
    phi_mpoly: object = field(repr=False)

    @property
    def degree(self) -> int:
        return self.phi.degree()

    def __eq__(self, other):
        return isinstance(other, CyclotomicPlace) and other.n == self.n

    def __hash__(self):
        return hash(("place", self.n))

    def zeta(self) -> "CycNum":
        return CycNum(self, PolyQ([0, 1]))

    def __str__(self):
        return f"Phi_{self.n} = {format_poly(self.phi)}"


@lru_cache(maxsize=None)
def place(n: int) -> CyclotomicPlace:
    from .polyq import cyclotomic

    phi = cyclotomic(n)
    return CyclotomicPlace(n, phi, n, mpoly_from_polyq(phi))


class CycNum:
    """Element of Q(zeta_n) = Q[q]/(Phi_n)."""

    __slots__ = ("place", "residue")

    def __init__(self, place_, residue, _reduced=False):
        if not isinstance(residue, PolyQ):
            residue = PolyQ([to_fmpq(residue)])
        if not _reduced:
            residue = residue % place_.phi
        self.place = place_
        self.residue = residue

    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.place.n != self.place.n:
                raise ValueError("different cyclotomic fields")
            return other
        if isinstance(other, _SCALARS):
            return CycNum(self.place, other)
        return None

    def zero_like(self):
        return CycNum(self.place, PolyQ([]), True)

    def one_like(self):
        return CycNum(self.place, PolyQ([1]), True)

    def is_zero(self):
        return self.residue.is_zero()

    def is_one(self):
        return self.residue.is_one()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNum(self.place, self.residue + o.residue, True)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.place, -self.residue, True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNum(self.place, self.residue - o.residue, True)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNum(self.place, self.residue * o.residue)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero(f"inverse of zero in Q(zeta_{self.place.n})")
        g, s, _ = self.residue.xgcd(self.place.phi)
        return CycNum(self.place, s / g)

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
        return self.residue == o.residue

    def __hash__(self):
        return hash((self.place.n, poly_key(self.residue)))

    def __str__(self):
        return format_poly(self.residue)

    def __repr__(self):
        return f"CycNum(n={self.place.n}, {self})"


def _lc_x(p):
    """(x-degree, leading coefficient in x as a PolyQ)."""
    # lex order x > q: the leading x-degree terms come first
    dx = p.monomial(0)[0]
    coeffs = {}
    for i in range(len(p)):
        ex, eq = p.monomial(i)
        if ex != dx:
            break
        coeffs[eq] = p.coefficient(i)
    arr = [0] * (max(coeffs) + 1)
    for eq, c in coeffs.items():
        arr[eq] = c
    return dx, PolyQ(arr)


def _inverse_residue(c: PolyQ, plc: CyclotomicPlace) -> PolyQ:
    g, s, _ = c.xgcd(plc.phi)
    return (s / g) % plc.phi


def _make_monic(p, plc):
    _, lc = _lc_x(p)
    if lc.is_one():
        return p
    return (p * mpoly_from_polyq(_inverse_residue(lc, plc))) % plc.phi_mpoly


def _rem(a, b_monic, db, plc):
    while not a.is_zero():
        da, lc = _lc_x(a)
        if da < db:
            break
        a = (a - mpoly_from_polyq(lc) * X ** (da - db) * b_monic) % plc.phi_mpoly
    return a


def _to_zpoly(p):
    """Primitive integer multiple of p in Z[x, q]."""
    den = 1
    for c in p.coeffs():
        den = math.lcm(den, int(c.q))
    return _ZCTX.from_dict({k: int(c * den) for k, c in p.to_dict().items()}).primitive()[1]


def _z_lc_x(p):
    dx = None
    out = {}
    for (ex, eq), c in p.terms():
        if dx is None:
            dx = ex
        elif ex != dx:
            break
        out[(0, eq)] = c
    return dx, _ZCTX.from_dict(out)


@lru_cache(maxsize=None)
def _z_phi(n):
    return _to_zpoly(place(n).phi_mpoly)


def cyc_gcd_cofactors(a, b, plc):
    """(g, a/g, b/g) for g the monic gcd of nonzero reduced a, b with positive x-degree."""
    found = common_divisor([a, b], plc)
    if found is not None:
        g, (qa, qb) = found
        return g, qa, qb
    g = _prs_gcd(a, b, plc)
    return g, cyc_divexact(a, g, plc), cyc_divexact(b, g, plc)


def cyc_gcd(a, b, plc):
    """Monic gcd in Q(zeta_n)[x] of two reduced polynomials (not both zero)."""
    if a.is_zero():
        return _make_monic(b, plc)
    if b.is_zero():
        return _make_monic(a, plc)
    if deg_x(a) == 0 or deg_x(b) == 0:
        return ONE
    return cyc_gcd_cofactors(a, b, plc)[0]


def _prs_gcd(a, b, plc):
    """Fallback: primitive pseudo-remainder sequence over Z[zeta][x]; Phi_n is monic over Z,
    so reduction stays integral.  Only the integer content is removed, which
    keeps coefficient growth in check without inverting in Q(zeta).
    """
    if deg_x(a) < deg_x(b):
        a, b = b, a
    phi = _z_phi(plc.n)
    a, b = _to_zpoly(a), _to_zpoly(b)
    xz = _ZCTX.gens()[0]
    while True:
        db, lb = _z_lc_x(b)
        if db == 0:
            return ONE
        while not a.is_zero():
            da, la = _z_lc_x(a)
            if da < db:
                break
            a = (lb * a - la * xz ** (da - db) * b) % phi
        if a.is_zero():
            g = CTX.from_dict(b.to_dict())
            return _make_monic(g, plc)
        a, b = b, a.primitive()[1]


def cyc_try_divexact(a, b, plc):
    """a / b in Q(zeta_n)[x], or None when b does not divide a.

    With b monic in x, lex division in Q[x, q] leaves a remainder of x-degree
    below deg b, and that remainder vanishes mod Phi_n exactly when b | a.
    """
    _, lc = _lc_x(b)
    inv = None
    if not lc.is_one():
        inv = mpoly_from_polyq(_inverse_residue(lc, plc))
        b = (b * inv) % plc.phi_mpoly
    quo, rem = divmod(a, b)
    if not (rem % plc.phi_mpoly).is_zero():
        return None
    if inv is not None:
        quo = quo * inv
    return quo % plc.phi_mpoly


def cyc_divexact(a, b, plc):
    """a / b in Q(zeta_n)[x] where b divides a."""
    quo = cyc_try_divexact(a, b, plc)
    if quo is None:
        raise ArithmeticError("inexact division in Q(zeta)[x]")
    return quo


class CycRatFun(BivariateFraction):
    """Element of Q(zeta_n)(x); den monic in x, gcd(num, den) = 1."""

    __slots__ = ("place",)

    def __init__(self, place_, num, den=None, _normalized=False):
        if isinstance(num, _SCALARS):
            num = CTX.from_dict({(0, 0): to_fmpq(num)}) if num != 0 else ZERO
        elif isinstance(num, CycNum):
            num = mpoly_from_polyq(num.residue)
        if den is None:
            den = ONE
        self.place = place_
        if not _normalized:
            num, den = _cyc_normalize(num, den, place_)
        self.num = num
        self.den = den
        self._hash = None

    def _new(self, num, den):
        return CycRatFun(self.place, num, den)

    def _new_normalized(self, num, den):
        return CycRatFun(self.place, num, den, _normalized=True)

    def _new_scaled(self, c):
        if c.is_zero():
            return self.zero_like()
        return CycRatFun(self.place, (self.num * c) % self.place.phi_mpoly, self.den, True)

    def _lift(self, other):
        return CycRatFun(self.place, other)

    def _same_field(self, other):
        return other.place.n == self.place.n

    def __mul__(self, other):
        if isinstance(other, CycNum):
            other = CycRatFun(self.place, other)
        return BivariateFraction.__mul__(self, other)

    __rmul__ = __mul__

    def __hash__(self):
        return hash((self.place.n, BivariateFraction.__hash__(self)))

    def sigma_root(self, i: int) -> "CycRatFun":
        """f(x) -> f(zeta^i x)."""
        i %= self.place.n
        if i == 0 or self.is_constant_in_x():
            return self
        scale = X * Q ** i
        phi = self.place.phi_mpoly
        num = self.num.compose(scale, Q) % phi
        den = self.den.compose(scale, Q) % phi
        # an automorphism of Q(zeta)[x] preserves coprimality; only rescale
        return CycRatFun(self.place, num, den, _normalized=True)._rescaled()

    def _rescaled(self):
        _, lc = _lc_x(self.den)
        if lc.is_one():
            return self
        inv = mpoly_from_polyq(_inverse_residue(lc, self.place))
        phi = self.place.phi_mpoly
        return CycRatFun(self.place, (self.num * inv) % phi, (self.den * inv) % phi, True)

    def derive(self) -> "CycRatFun":
        """x d/dx on Q(zeta)(x)."""
        if self.is_constant_in_x():
            return self.zero_like()
        dn = self.num.derivative("x")
        dd = self.den.derivative("x")
        return CycRatFun(self.place, X * (dn * self.den - self.num * dd), self.den * self.den)

    def constant_value(self) -> CycNum:
        if not self.is_constant_in_x():
            raise ValueError(f"{self} depends on x")
        _, lc = _lc_x(self.num) if not self.num.is_zero() else (0, PolyQ([]))
        return CycNum(self.place, lc, True)

    def __str__(self):
        return self._format()

    def __repr__(self):
        return f"CycRatFun(n={self.place.n}, {self})"


def _cyc_normalize(num, den, plc):
    phi = plc.phi_mpoly
    num = num % phi
    den = den % phi
    if den.is_zero():
        raise DivisionByZero(f"zero denominator in Q(zeta_{plc.n})(x)")
    if num.is_zero():
        return ZERO, ONE
    if deg_x(den) > 0 and deg_x(num) > 0:
        _, num, den = cyc_gcd_cofactors(num, den, plc)
    _, lc = _lc_x(den)
    if not lc.is_one():
        inv = mpoly_from_polyq(_inverse_residue(lc, plc))
        num = (num * inv) % phi
        den = (den * inv) % phi
    return num, den


def reduce_at_place(f, plc) -> CycRatFun:
    """Image of f in Q(zeta_n)(x); BadReduction if its denominator vanishes mod Phi_n."""
    if isinstance(plc, int):
        plc = place(plc)
    if isinstance(f, RatQ):
        f = RatFun(f)
    elif isinstance(f, _SCALARS):
        f = RatFun(f)
    den = f.den % plc.phi_mpoly
    if den.is_zero():
        raise BadReduction(plc.n, format_mpoly(f.den))
    return CycRatFun(plc, f.num, f.den)


def reduce_constant(c: RatQ, plc) -> CycNum:
    if isinstance(plc, int):
        plc = place(plc)
    den = c.den % plc.phi
    if den.is_zero():
        raise BadReduction(plc.n, format_poly(c.den))
    return CycNum(plc, c.num) / CycNum(plc, den, True)
