"""Matrices over Q(zeta_n)(x) kept as (polynomial matrix) / (common denominator).

Products, shifts x -> zeta^i x, identity tests and equality need no gcd in
this form; canonical entries are only computed on demand.
"""

from functools import cached_property

from .cyclo import CycRatFun, _lc_x, _inverse_residue, cyc_divexact, cyc_gcd
from .modgcd import common_divisor
from .ratfun import ONE, ZERO, X, Q, mpoly_from_polyq


class FracMatrix:
    __slots__ = ("place", "num", "den", "__dict__")

    def __init__(self, place_, num, den):
        self.place = place_
        self.num = tuple(tuple(row) for row in num)
        self.den = den

    @property
    def dim(self) -> int:
        return len(self.num)

    @classmethod
    def from_entries(cls, place_, rows):
        """Common denominator: product of the distinct entry denominators."""
        dens = []
        for row in rows:
            for e in row:
                if not e.den.is_one() and all(e.den != d for d in dens):
                    dens.append(e.den)
        phi = place_.phi_mpoly
        den = ONE
        for d in dens:
            den = (den * d) % phi
        num = []
        for row in rows:
            out = []
            for e in row:
                cof = ONE
                for d in dens:
                    if d != e.den:
                        cof = cof * d
                out.append((e.num * cof) % phi)
            num.append(out)
        return cls(place_, num, den)

    @classmethod
    def identity(cls, place_, dim):
        return cls(place_, [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)], ONE)

    def sigma_root(self, i: int) -> "FracMatrix":
        i %= self.place.n
        if i == 0:
            return self
        scale = X * Q ** i
        phi = self.place.phi_mpoly

        def shift(p):
            if p.is_zero() or p.degrees()[0] == 0:
                return p
            return p.compose(scale, Q) % phi

        return FracMatrix(self.place, [[shift(p) for p in row] for row in self.num], shift(self.den))

    def __matmul__(self, other: "FracMatrix") -> "FracMatrix":
        phi = self.place.phi_mpoly
        k = len(other.num)
        cols = len(other.num[0])
        num = []
        for row in self.num:
            out = []
            for j in range(cols):
                acc = ZERO
                for t in range(k):
                    a = row[t]
                    b = other.num[t][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                out.append(acc % phi)
            num.append(out)
        return FracMatrix(self.place, num, (self.den * other.den) % phi)

    def cancel(self) -> "FracMatrix":
        """Divide num and den by their common gcd in Q(zeta)[x]; den made monic."""
        plc = self.place
        if self.den.degrees()[0] == 0:
            return self._monic()
        flat = [p for row in self.num for p in row if not p.is_zero()]
        if not flat:
            return FracMatrix(plc, self.num, ONE)
        found = common_divisor([self.den] + flat, plc)
        if found is None:
            g = self.den
            for p in flat:
                g = cyc_gcd(g, p, plc)
            quotients = [cyc_divexact(p, g, plc) for p in [self.den] + flat]
        else:
            g, quotients = found
        if g.is_one():
            return self._monic()
        den = quotients[0]
        it = iter(quotients[1:])
        num = [[next(it) if not p.is_zero() else p for p in row] for row in self.num]
        return FracMatrix(plc, num, den)._monic()

    def _monic(self):
        _, lc = _lc_x(self.den)
        if lc.is_one():
            return self
        inv = mpoly_from_polyq(_inverse_residue(lc, self.place))
        phi = self.place.phi_mpoly
        return FracMatrix(self.place, [[(p * inv) % phi for p in row] for row in self.num],
                          (self.den * inv) % phi)

    def is_identity(self) -> bool:
        for i, row in enumerate(self.num):
            for j, p in enumerate(row):
                if p != (self.den if i == j else ZERO):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, FracMatrix):
            return NotImplemented
        if other.place.n != self.place.n or other.dim != self.dim:
            return False
        phi = self.place.phi_mpoly
        for ra, rb in zip(self.num, other.num):
            for a, b in zip(ra, rb):
                if ((a * other.den - b * self.den) % phi) != 0:
                    return False
        return True

    __hash__ = None

    @cached_property
    def entries(self) -> tuple:
        """Canonical CycRatFun entries."""
        plc = self.place
        if self.is_identity():
            one = CycRatFun(plc, 1)
            zero = CycRatFun(plc, 0)
            return tuple(tuple(one if i == j else zero for j in range(self.dim)) for i in range(self.dim))
        if self.den.degrees()[0] == 0:
            # constant denominator: scale instead of a gcd
            _, lc = _lc_x(self.den)
            inv = mpoly_from_polyq(_inverse_residue(lc, plc))
            phi = plc.phi_mpoly
            return tuple(
                tuple(CycRatFun(plc, (p * inv) % phi, ONE, _normalized=True) for p in row)
                for row in self.num
            )
        return tuple(tuple(CycRatFun(plc, p, self.den) for p in row) for row in self.num)
