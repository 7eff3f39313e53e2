"""Generic Galois groups of diagonal modules with constant entries.

For A = diag(c_1, ..., c_nu) with c_i in Q(q)*, the group is the subgroup of
the diagonal torus cut out by the characters t -> prod t_i^{m_i} for m in the
relation lattice {m : prod c_i^{m_i} in q^Z}.  Constants are put in a
multiplicative normal form (sign, rational primes, power of q, monic
irreducible factors) and the lattice is the integer kernel of the exponent
matrix; the sign is an order-2 generator and contributes a parity condition.
"""

from dataclasses import dataclass
from functools import lru_cache

import flint

from . import lattice as lat
from .algebra import PolyQ, RatQ, cyclotomic, parse_ratfun, place as get_place
from .algebra.cyclo import reduce_constant
from .algebra.polyq import format_poly, poly_key
from .curvature import DEFAULT_THRESHOLD, PlaceStatus, aggregate, place_range
from .errors import BadReduction, FactorizationOutOfRange

# degree bound for irreducible factors; cyclotomic factors are exempt since
# their irreducibility is known
MAX_FACTOR_DEGREE = 4


@dataclass(frozen=True)
class FactoredConstant:
    sign: int
    primes: tuple  # ((p, e), ...) ascending p
    q_exponent: int
    poly_factors: tuple  # ((monic irreducible PolyQ, e), ...) ordered by poly_key

    def reconstruct(self) -> RatQ:
        num = PolyQ([self.sign])
        den = PolyQ([1])
        for p, e in self.primes:
            if e > 0:
                num *= p ** e
            else:
                den *= p ** (-e)
        qpow = PolyQ([0] * abs(self.q_exponent) + [1])
        if self.q_exponent >= 0:
            num *= qpow
        else:
            den *= qpow
        for f, e in self.poly_factors:
            if e > 0:
                num *= f ** e
            else:
                den *= f ** (-e)
        return RatQ(num, den)

    def generators(self):
        """(key, exponent) pairs for the exponent matrix, q excluded."""
        out = [(("prime", p), e) for p, e in self.primes]
        out += [(("poly", poly_key(f)), e) for f, e in self.poly_factors]
        return out

    def __str__(self):
        parts = ["-1"] if self.sign < 0 else []
        parts += [f"{p}^{e}" for p, e in self.primes]
        if self.q_exponent:
            parts.append(f"q^{self.q_exponent}")
        parts += [f"({format_poly(f)})^{e}" for f, e in self.poly_factors]
        return " * ".join(parts) or "1"


@lru_cache(maxsize=None)
def _cyclotomic_by_degree(d: int) -> tuple:
    # phi(n) >= sqrt(n/2), so phi(n) = d forces n <= 2 d^2
    return tuple(n for n in range(1, 2 * d * d + 1) if cyclotomic(n).degree() == d)


def _is_cyclotomic(f: PolyQ) -> bool:
    return any(cyclotomic(n) == f for n in _cyclotomic_by_degree(f.degree()))


def _coerce_constant(c) -> RatQ:
    if isinstance(c, RatQ):
        return c
    if isinstance(c, str):
        f = parse_ratfun(c)
        if not f.is_constant_in_x():
            raise ValueError(f"constant {c!r} depends on x")
        return f.to_ratq()
    return RatQ(c)


def _factor_poly(p: PolyQ, sign: int, into_primes: dict, into_polys: dict) -> int:
    """Accumulate the factors of p with multiplicity sign; returns the q-exponent."""
    content, factors = p.factor()
    content = flint.fmpq(content)
    q_exp = 0
    for f, e in factors:
        f = PolyQ(f)
        lc = f.leading_coefficient()
        content *= lc ** e
        f = f / lc
        if f.degree() == 1 and f[0] == 0:
            q_exp += sign * e
            continue
        if f.degree() > MAX_FACTOR_DEGREE and not _is_cyclotomic(f):
            raise FactorizationOutOfRange(format_poly(f), f.degree())
        key = poly_key(f)
        entry = into_polys.setdefault(key, [f, 0])
        entry[1] += sign * e
    for part, s in ((int(content.p), sign), (int(content.q), -sign)):
        for prime, e in flint.fmpz(abs(part)).factor():
            into_primes[int(prime)] = into_primes.get(int(prime), 0) + s * int(e)
    return q_exp


def factor_constant(c) -> FactoredConstant:
    """Multiplicative normal form of a nonzero constant in Q(q)."""
    c = _coerce_constant(c)
    if c.is_zero():
        raise ValueError("factor_constant needs a nonzero constant")
    primes, polys = {}, {}
    q_exp = _factor_poly(c.num, 1, primes, polys)
    q_exp += _factor_poly(c.den, -1, primes, polys)
    # den is monic, so the sign sits in the numerator content
    sign = -1 if c.num.leading_coefficient() < 0 else 1
    out = FactoredConstant(
        sign,
        tuple(sorted((p, e) for p, e in primes.items() if e)),
        q_exp,
        tuple((f, e) for key, (f, e) in sorted(polys.items()) if e),
    )
    return out


@dataclass(frozen=True)
class RelationLattice:
    dim: int
    basis: tuple  # canonical integer vectors of length dim

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, m) -> bool:
        if len(m) != self.dim:
            raise ValueError("vector length does not match the lattice dimension")
        return lat.contains([list(v) for v in self.basis], m)


@dataclass(frozen=True)
class DiagonalGroupDescription:
    dim: int
    lattice: RelationLattice
    torus_dimension: int
    finite_part: tuple  # elementary divisors > 1
    elementary_divisors: tuple
    saturation: tuple  # basis of the saturated lattice: the identity component

    @property
    def is_trivial(self) -> bool:
        return self.torus_dimension == 0 and not self.finite_part


def exponent_matrix(factored) -> tuple:
    """(rows, parity row) over the generators occurring in ``factored``."""
    keys = sorted({k for fc in factored for k, _ in fc.generators()})
    index = {k: i for i, k in enumerate(keys)}
    rows = [[0] * len(factored) for _ in keys]
    for j, fc in enumerate(factored):
        for k, e in fc.generators():
            rows[index[k]][j] = e
    parity = [1 if fc.sign < 0 else 0 for fc in factored]
    return rows, parity


def relation_lattice(constants) -> RelationLattice:
    """Basis of {m in Z^nu : prod c_i^{m_i} in q^Z}."""
    factored = [factor_constant(c) for c in constants]
    nu = len(factored)
    rows, parity = exponent_matrix(factored)
    if any(parity):
        # (-1)^{s.m} = 1 iff s.m = 2k: add k as an auxiliary unknown
        aug = [row + [0] for row in rows] + [parity + [-2]]
        kernel = lat.integer_kernel(aug, nu + 1)
        basis = lat.canonical_basis([v[:nu] for v in kernel], nu)
    else:
        basis = lat.integer_kernel(rows, nu)
    return RelationLattice(nu, tuple(tuple(v) for v in basis))


def diagonal_galois_group(constants) -> DiagonalGroupDescription:
    rl = relation_lattice(constants)
    basis = [list(v) for v in rl.basis]
    divisors = lat.smith_diagonal(basis, rl.dim)
    return DiagonalGroupDescription(
        rl.dim,
        rl,
        rl.dim - lat.rank(basis),
        tuple(d for d in divisors if d > 1),
        tuple(divisors),
        tuple(tuple(v) for v in lat.saturation(basis, rl.dim)),
    )


@dataclass
class CharacterReport:
    """Values of the defining characters on the curvature diag(c_i^n)."""

    place: object
    curvature: list  # reduced c_i^n
    values: list  # one CycNum per lattice basis vector
    is_identity: bool

    @property
    def n(self):
        return self.place.n


def _constants_status(constants, n):
    plc = get_place(n)
    reduced = []
    for i, c in enumerate(constants):
        try:
            r = reduce_constant(c, plc)
        except BadReduction:
            return PlaceStatus(plc, False, f"c[{i}] denominator {format_poly(c.den)}"), None
        if r.is_zero():
            return PlaceStatus(plc, False, f"c[{i}] = {c} vanishes"), None
        reduced.append(r)
    return PlaceStatus(plc, True), reduced


def verify_by_curvatures(constants, lattice: RelationLattice, n_min=1, n_max=30,
                         threshold=DEFAULT_THRESHOLD, exclude_n1=False):
    """Check prod (c_i^n)^{m_i} = 1 mod Phi_n for every basis vector m and good n."""
    constants = [_coerce_constant(c) for c in constants]
    if lattice.dim != len(constants):
        raise ValueError("lattice vectors and constants differ in length")
    results = []
    for n in place_range(n_min, n_max, exclude_n1):
        status, reduced = _constants_status(constants, n)
        if not status.good:
            results.append((n, status, None))
            continue
        curv = [r ** n for r in reduced]
        values = []
        for m in lattice.basis:
            v = curv[0].one_like()
            for ci, mi in zip(curv, m):
                if mi:
                    v = v * ci ** mi
            values.append(v)
        report = CharacterReport(status.place, curv, values, all(v.is_one() for v in values))
        results.append((n, status, report))
    return aggregate(results, n_min, n_max, threshold)
