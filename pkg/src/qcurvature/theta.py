"""Certified evaluation of theta-type solutions and Frobenius series.

Everything is exact rational ball arithmetic: a Ball is mid +- rad with
rational endpoints, and every radius is a proven bound (truncation tails are
estimated by geometric majorants, never by looking at the next term).

For real q > 1 the Jacobi theta function

    Theta(x) = sum_{n in Z} q^{-n(n-1)/2} x^n

satisfies Theta(qx) = qx Theta(x).  Hence e_c(x) = Theta(cx)/Theta(x) solves
y(qx) = c y(x) and l(x) = x Theta'(x)/Theta(x) solves y(qx) = y(x) + 1.  Both
have poles on -q^Z, where Theta vanishes.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import flint

from .algebra import PolyQ, RatQ
from .algebra import matrix as mx
from .algebra.polyq import to_fmpq, to_fraction
from .algebra.ratfun import mpoly_x_coeffs
from .errors import (
    BadSpecialization, DivisionByZero, NearZero, NotRegularSingular, Resonant,
    TruncationDominates,
)

_RADIUS_BITS = 64


def _round_up(r: Fraction) -> Fraction:
    """Dyadic upper bound of r with about 64 significant bits."""
    if r <= 0 or r.denominator.bit_length() <= _RADIUS_BITS:
        return r
    shift = _RADIUS_BITS - (r.numerator.bit_length() - r.denominator.bit_length())
    if shift <= 0:
        return Fraction(math.ceil(r))
    return Fraction(-((-r.numerator << shift) // r.denominator), 1 << shift)


@dataclass(frozen=True)
class Ball:
    """The closed interval [mid - rad, mid + rad]."""

    mid: Fraction
    rad: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "mid", Fraction(self.mid))
        object.__setattr__(self, "rad", _round_up(Fraction(self.rad)))
        if self.rad < 0:
            raise ValueError("negative radius")

    @classmethod
    def _wrap(cls, v):
        return v if isinstance(v, Ball) else Ball(to_fraction(v))

    @property
    def lower(self) -> Fraction:
        return self.mid - self.rad

    @property
    def upper(self) -> Fraction:
        return self.mid + self.rad

    def magnitude(self) -> Fraction:
        """Upper bound on |v| over the ball."""
        return abs(self.mid) + self.rad

    def contains(self, v) -> bool:
        return abs(to_fraction(v) - self.mid) <= self.rad

    def contains_zero(self) -> bool:
        return self.contains(0)

    def __add__(self, other):
        other = self._wrap(other)
        return Ball(self.mid + other.mid, self.rad + other.rad)

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.mid, self.rad)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        other = self._wrap(other)
        rad = abs(self.mid) * other.rad + abs(other.mid) * self.rad + self.rad * other.rad
        return Ball(self.mid * other.mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._wrap(other)
        if other.contains_zero():
            raise NearZero(other)
        mid = self.mid / other.mid
        # |a/b - ma/mb| <= (ra + |ma/mb| rb) / (|mb| - rb)
        rad = (self.rad + abs(mid) * other.rad) / (abs(other.mid) - other.rad)
        return Ball(mid, rad)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __str__(self):
        return f"{float(self.mid):.17g} +- {float(self.rad):.3g}"

    def to_json(self) -> dict:
        return {"midpoint": str(self.mid), "radius": str(self.rad),
                "approx": f"{float(self.mid):.17g}", "radius_approx": f"{float(self.rad):.3e}"}


def _check_q(q_val) -> Fraction:
    q_val = to_fraction(q_val)
    if q_val <= 1:
        raise ValueError("q_val must be a rational > 1")
    return q_val


def _theta_cutoff(x: Fraction, q: Fraction, weight: int) -> int:
    """Smallest N >= 1 with q^N >= 2^(1+weight) max(|x|, 1/|x|).

    For n >= N+1 the ratio |t_{n+1}/t_n| = |x| q^-n is <= 2^-(1+weight), and
    for n <= -N the ratio |t_{n-1}/t_n| = q^(n-1)/|x| is too.  The factor
    |n+1|/|n| <= 2 of the weighted sum leaves a ratio <= 1/2, so each tail is
    at most twice its first term.
    """
    r = max(abs(x), 1 / abs(x)) * 2 ** (1 + weight)
    n, p = 1, q
    while p < r:
        n += 1
        p *= q
    return n


def _theta_term(x: Fraction, q: Fraction, n: int, weight: int) -> Fraction:
    t = x ** n / q ** (n * (n - 1) // 2)
    return t * n ** weight if weight else t


def _theta_cut(x: Fraction, q: Fraction, tol, weight: int, at_least: int = 1) -> int:
    """Truncation order whose certified tail is below tol."""
    if x == 0:
        raise ValueError("theta is evaluated at nonzero x only")
    tol = to_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_cut = max(_theta_cutoff(x, q, weight), at_least)
    while _theta_tail(x, q, n_cut, weight) >= tol:
        n_cut += 1
    return n_cut


def _theta_tail(x, q, n_cut, weight):
    return 2 * (abs(_theta_term(x, q, n_cut + 1, weight)) + abs(_theta_term(x, q, -n_cut, weight)))


def _theta_sum(x: Fraction, q: Fraction, n_cut: int, weight: int) -> Ball:
    """sum n^weight q^{-n(n-1)/2} x^n over 1-N <= n <= N, plus certified tail.

    The range is symmetric under n -> 1-n, which preserves n(n-1)/2.
    """
    mid = sum((_theta_term(x, q, n, weight) for n in range(1 - n_cut, n_cut + 1)), Fraction(0))
    return Ball(mid, _theta_tail(x, q, n_cut, weight))


def theta_eval(x0, q_val, tol) -> Ball:
    x0, q = to_fraction(x0), _check_q(q_val)
    return _theta_sum(x0, q, _theta_cut(x0, q, tol, 0), 0)


def theta_prime_x(x0, q_val, tol) -> Ball:
    """x Theta'(x) = sum n q^{-n(n-1)/2} x^n."""
    x0, q = to_fraction(x0), _check_q(q_val)
    return _theta_sum(x0, q, _theta_cut(x0, q, tol, 1), 1)


def char_solution_eval(c, x0, q_val, tol) -> Ball:
    """e_c(x0) = Theta(c x0) / Theta(x0); NearZero when Theta(x0) may vanish."""
    c = to_fraction(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    den = theta_eval(x0, q_val, tol)
    if den.contains_zero():
        raise NearZero(den, "Theta(x0)")
    if c == 1:
        # e_1 = 1 identically off the zeros of Theta
        return Ball(1)
    return theta_eval(c * to_fraction(x0), q_val, tol) / den


def log_solution_eval(x0, q_val, tol) -> Ball:
    """l(x0) = x0 Theta'(x0) / Theta(x0).

    Both sums share one truncation range, so l(1) has midpoint exactly 1/2.
    """
    x0, q = to_fraction(x0), _check_q(q_val)
    n_cut = _theta_cut(x0, q, tol, 0, _theta_cut(x0, q, tol, 1))
    den = _theta_sum(x0, q, n_cut, 0)
    if den.contains_zero():
        raise NearZero(den, "Theta(x0)")
    return _theta_sum(x0, q, n_cut, 1) / den


# Frobenius series ---------------------------------------------------------


@dataclass(frozen=True)
class SeriesSolution:
    """F = sum F_k x^k with F(qx) B_0 = B(x) F(x) mod x^(N+1)."""

    order: int
    coefficients: tuple  # F_0 .. F_N, matrices over RatQ
    exponents: tuple  # diagonal of B_0
    residual_order: int

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def residual(self, m) -> list:
        """Coefficients of F(qx) B_0 - B(x) F(x) through x^N for the module m."""
        b_coeffs = _system_series(m, self.order)
        out = []
        for k in range(self.order + 1):
            qk = RatQ.q_power(k)
            lhs = [[qk * self.coefficients[k][i][j] * self.exponents[j] for j in range(self.dim)]
                   for i in range(self.dim)]
            rhs = _conv(b_coeffs, self.coefficients, k)
            out.append(mx.mat_sub(mx.as_matrix(lhs), rhs))
        return out


def _conv(b, f, k, start=0):
    """sum_{j=start}^{k} b_j f_{k-j}."""
    acc = None
    for j in range(start, k + 1):
        if j >= len(b):
            break
        t = mx.mat_mul(b[j], f[k - j])
        acc = t if acc is None else mx.mat_add(acc, t)
    if acc is None:
        z = f[0][0][0].zero_like()
        return mx.as_matrix([[z] * len(f[0]) for _ in f[0]])
    return acc


def _system_series(m, order: int) -> list:
    """B_0 .. B_order for the system matrix B = A^-1, entries RatQ."""
    if m.step != 1:
        raise ValueError("series solutions need a non-iterated module")
    b = m.system_matrix
    dim = len(b)
    try:
        series = [[e.x_series(order) for e in row] for row in b]
    except DivisionByZero:
        raise NotRegularSingular("the system matrix has a pole at x = 0") from None
    return [mx.as_matrix([[series[i][j][k] for j in range(dim)] for i in range(dim)])
            for k in range(order + 1)]


def _exponents(b0) -> tuple:
    dim = len(b0)
    for i in range(dim):
        for j in range(dim):
            if i != j and not b0[i][j].is_zero():
                raise NotRegularSingular(f"B(0) is not diagonal: entry ({i + 1},{j + 1}) = {b0[i][j]}")
    c = tuple(b0[i][i] for i in range(dim))
    for i, ci in enumerate(c):
        if ci.is_zero():
            raise NotRegularSingular(f"B(0) is singular: c_{i + 1} = 0")
    return c


def check_nonresonant(c, order: int) -> None:
    """Resonant(k, l, m) for the first k <= order with q^k c_m = c_l in Q(q)."""
    for k in range(1, order + 1):
        qk = RatQ.q_power(k)
        for l, cl in enumerate(c, start=1):
            for m, cm in enumerate(c, start=1):
                if (qk * cm - cl).is_zero():
                    raise Resonant(k, l, m)


def frobenius_series(m, order: int) -> SeriesSolution:
    """Solve F_k[l,m] (q^k c_m - c_l) = (sum_{j>=1} B_j F_{k-j})[l,m] for k <= order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    b = _system_series(m, order)
    c = _exponents(b[0])
    check_nonresonant(c, order)
    dim = len(c)
    one, zero = RatQ(1), RatQ(0)
    f = [mx.identity(dim, one, zero)]
    for k in range(1, order + 1):
        rhs = _conv(b, f, k, start=1)
        qk = RatQ.q_power(k)
        f.append(mx.as_matrix([[rhs[i][j] / (qk * c[j] - c[i]) for j in range(dim)]
                               for i in range(dim)]))
    return SeriesSolution(order, tuple(f), c, order)


# certified evaluation of the fundamental matrix ----------------------------


def _row_norm(a) -> Fraction:
    return max(sum(abs(v) for v in row) for row in a)


def _x_poly(p) -> PolyQ:
    """A q-free polynomial of CTX as a PolyQ in x."""
    return PolyQ([c[0] for c in mpoly_x_coeffs(p)])


@dataclass(frozen=True)
class _Majorant:
    """||B_j|| <= beta[j] for j < len(beta) and <= k_const lam^j beyond."""

    beta: list
    k_const: Fraction
    lam: Fraction
    support: int = None  # B_j = 0 for j > support when B is polynomial


_POWER_STEP = 32


def _root_of_bound(rho: Fraction, t: int) -> Fraction:
    """Rational lam >= rho^(1/t), within about 2^-20 relative."""
    lam = Fraction(math.ceil(float(rho) ** (1.0 / t) * (1 << 20)) + 1, 1 << 20)
    while lam ** t < rho:
        lam *= Fraction(1025, 1024)
    return lam


def _inverse_series_bound(d: list):
    """(C, lam) with |e_j| <= C lam^j for 1/d = (1/d_0) sum e_j x^j.

    The vector (e_j, ..., e_{j-s+1}) moves by the companion matrix M of d, so
    |e_j| <= ||M^j|| <= ||M^r|| ||M^t||^a for j = a t + r, in the max-row norm.
    """
    s = len(d) - 1
    if s == 0:
        return Fraction(1), Fraction(1, 1024)
    d0 = d[0]
    comp = [[Fraction(0)] * s for _ in range(s)]
    for i in range(s):
        comp[0][i] = -d[i + 1] / d0
    for i in range(1, s):
        comp[i][i - 1] = Fraction(1)
    m = flint.fmpq_mat([[to_fmpq(v) for v in row] for row in comp])
    power = flint.fmpq_mat(s, s)
    for i in range(s):
        power[i, i] = 1
    small = Fraction(0)
    for _ in range(_POWER_STEP):
        small = max(small, _mat_norm(power))
        power = power * m
    rho = _mat_norm(power)
    lam = _root_of_bound(rho, _POWER_STEP)
    # rho^a <= lam^(j - r) <= lam^j lam^-(t-1) when lam < 1
    c_const = small if lam >= 1 else small / lam ** (_POWER_STEP - 1)
    return c_const, lam


def _mat_norm(m) -> Fraction:
    return max(sum(abs(to_fraction(v)) for v in row) for row in m.tolist())


def _coefficient_majorant(b_spec, exact_terms: int) -> _Majorant:
    """Bounds on the Taylor coefficients of B at q = q_val, for every j.

    With B = P/d entrywise over one denominator d, d(0) != 0, and
    |[x^j] 1/d| <= (C/|d_0|) lam^j, each entry obeys
    |B_j| <= (C/|d_0|) lam^j sum_i |P_i| lam^-i.
    """
    d = PolyQ([1])
    for row in b_spec:
        for e in row:
            den = _x_poly(e.den)
            d = d * den / d.gcd(den)
    dpoly = d
    d = [to_fraction(c) for c in d.coeffs()]
    d0 = d[0]
    if d0 == 0:
        raise NotRegularSingular("the system matrix has a pole at x = 0")
    c_const, lam = _inverse_series_bound(d)
    row_sums = []
    for row in b_spec:
        total = Fraction(0)
        for ent in row:
            p_ent = _x_poly(ent.num) * dpoly / _x_poly(ent.den)
            total += sum(abs(to_fraction(pi)) / lam ** i for i, pi in enumerate(p_ent.coeffs()))
        row_sums.append(total)
    k_const = c_const / abs(d0) * max(row_sums)
    support = None
    if len(d) == 1:
        support = max(_x_poly(e.num).degree() for row in b_spec for e in row)
        if support <= exact_terms:
            k_const = Fraction(0)
    series = [[e.x_series(exact_terms) for e in row] for row in b_spec]
    beta = [
        _row_norm([[to_fraction(series[i][j][k].to_fraction()) for j in range(len(b_spec))]
                   for i in range(len(b_spec))])
        for k in range(exact_terms + 1)
    ]
    return _Majorant(beta, k_const, lam, support)


@dataclass(frozen=True)
class FundamentalEvaluation:
    """U(x0) = F(x0) diag(e_{c_i}(x0)) and the residual U(q x0) - B(x0) U(x0)."""

    u: tuple  # matrix of Ball
    residual: tuple  # matrix of Ball, each should contain 0
    exponents: tuple  # c_i at q = q_val
    truncation_bound: Fraction  # tail of sum_{k>N} ||F_k|| |q x0|^k
    order: int

    def residual_contains_zero(self) -> bool:
        return all(b.contains_zero() for row in self.residual for b in row)

    def max_residual_radius(self) -> Fraction:
        return max(b.rad for row in self.residual for b in row)


_EXTRA_TERMS = 256


def _delta(c, q, k) -> Fraction:
    """min |q^k c_m - c_l|; Resonant if some difference vanishes at q_val."""
    delta = None
    for li, cl in enumerate(c, start=1):
        for mi, cm in enumerate(c, start=1):
            v = abs(q ** k * cm - cl)
            if v == 0:
                raise Resonant(k, li, mi)
            delta = v if delta is None else min(delta, v)
    return delta


def _truncation_tails(f_norms, maj: _Majorant, c, q, points, order, tol):
    """Bounds on sum_{k>N} ||F_k|| |x|^k for each x in points.

    For k > N the recursion gives ||F_k|| <= g_k with
    g_k = (sum_{j=1}^{k} b_j g_{k-j}) / delta_k, delta_k = min |q^k c_m - c_l|.
    If S_k(mu) = sum_{j=1}^{k} b_j mu^-j <= delta_k for every k > K, then
    induction gives g_k <= G mu^k with G = max_{i <= K} g_i mu^-i.  When B
    is a polynomial of degree D only g_{K-D+1} .. g_K enter the induction.

    With b_j = k_const lam^j past N and r = lam/mu < q, S_k q^-k decreases in
    k, so the condition is checked at k = K+1 only.  F converges up to q times
    the radius of B, which mu in (lam/q, lam] exploits.
    """
    n = order
    xmax = max(abs(p) for p in points)
    cmin = min(abs(ci) for ci in c)
    cmax = max(abs(ci) for ci in c)

    def b(j):
        return maj.beta[j] if j < len(maj.beta) else _round_up(maj.k_const * maj.lam ** j)

    g = list(f_norms)
    best = None
    for factor in (Fraction(5, 4), Fraction(2), Fraction(4)):
        mu = maj.lam * factor / q
        if mu * xmax >= 1 or mu == maj.lam:
            continue
        r = maj.lam / mu
        head = sum((b(j) / mu ** j for j in range(1, n + 1)), Fraction(0))

        def condition_holds(cut):
            k = cut + 1
            rhs = q ** k * cmin - cmax
            if rhs <= 0:
                return False
            if maj.k_const == 0:
                tail_sum = Fraction(0)
            elif r < 1:
                tail_sum = maj.k_const * r ** (n + 1) / (1 - r)
            else:
                tail_sum = maj.k_const * r ** (k + 1) / (r - 1)
            return head + tail_sum <= rhs

        cut = n
        while not condition_holds(cut):
            cut += 1
        for cut in range(cut, cut + _EXTRA_TERMS):
            while len(g) <= cut:
                k = len(g)
                g.append(_round_up(sum(b(j) * g[k - j] for j in range(1, k + 1)) / _delta(c, q, k)))
            start = 0
            if maj.k_const == 0 and maj.support is not None:
                start = max(cut - maj.support + 1, 0)
            big_g = max((g[i] / mu ** i for i in range(start, cut + 1)), default=Fraction(0))
            tails = []
            for p in points:
                ax = abs(p)
                t = sum((g[k] * ax ** k for k in range(n + 1, cut + 1)), Fraction(0))
                t += big_g * (mu * ax) ** (cut + 1) / (1 - mu * ax)
                tails.append(_round_up(t))
            if best is None or max(tails) < max(best):
                best = tails
            if max(best) < tol:
                return best
    return best


def _eval_poly_matrix(f, x):
    dim = len(f[0])
    out = [[Fraction(0)] * dim for _ in range(dim)]
    p = Fraction(1)
    for fk in f:
        for i in range(dim):
            for j in range(dim):
                if fk[i][j]:
                    out[i][j] += fk[i][j] * p
        p *= x
    return out


def fundamental_eval(m, x0, q_val, order: int, tol) -> FundamentalEvaluation:
    """Certified U(x0) for Y(qx) = B(x) Y(x), B = A^-1 regular singular at 0."""
    q = _check_q(q_val)
    x0 = to_fraction(x0)
    tol = to_fraction(tol)
    if x0 == 0:
        raise ValueError("x0 must be nonzero")
    series = frobenius_series(m, order)
    dim = series.dim
    try:
        c = [to_fraction(ci(q)) for ci in series.exponents]
    except (DivisionByZero, ZeroDivisionError):
        raise BadSpecialization(f"an exponent has a pole at q = {q}") from None
    if any(ci == 0 for ci in c):
        raise BadSpecialization(f"an exponent vanishes at q = {q}")
    try:
        b_spec = [[e.subs_q(q) for e in row] for row in m.system_matrix]
    except DivisionByZero:
        raise BadSpecialization(f"B has a pole along q = {q}") from None

    # numeric Frobenius coefficients at q_val; symbolic non-resonance was checked
    maj = _coefficient_majorant(b_spec, order)
    b_num = [[[to_fraction(t.to_fraction()) for t in e.x_series(order)] for e in row] for row in b_spec]
    f = [[[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]]
    for k in range(1, order + 1):
        fk = []
        for i in range(dim):
            row = []
            for j in range(dim):
                acc = sum(
                    b_num[i][s][jj] * f[k - jj][s][j]
                    for jj in range(1, k + 1) for s in range(dim)
                )
                den = q ** k * c[j] - c[i]
                if den == 0:
                    raise Resonant(k, i + 1, j + 1)
                row.append(acc / den)
            fk.append(row)
        f.append(fk)

    points = [x0, q * x0]
    tails = _truncation_tails([_row_norm(fk) for fk in f], maj, c, q, points, order, tol)
    if tails is None:
        raise TruncationDominates(float("inf"), tol)
    bound = max(tails)
    if bound > tol:
        raise TruncationDominates(bound, tol)

    def u_at(x, tail):
        fx = _eval_poly_matrix(f, x)
        e = [char_solution_eval(ci, x, q, tol) for ci in c]
        return [[Ball(fx[i][j], tail) * e[j] for j in range(dim)] for i in range(dim)]

    u0 = u_at(x0, tails[0])
    u1 = u_at(q * x0, tails[1])
    b_at = [[e.evaluate(x0, q) for e in row] for row in m.system_matrix]
    bu = [[sum((u0[s][j] * b_at[i][s] for s in range(dim)), Ball(0)) for j in range(dim)]
          for i in range(dim)]
    residual = tuple(tuple(u1[i][j] - bu[i][j] for j in range(dim)) for i in range(dim))
    return FundamentalEvaluation(
        tuple(tuple(r) for r in u0), residual, tuple(c), bound, order,
    )


__all__ = [
    "Ball", "FundamentalEvaluation", "SeriesSolution", "char_solution_eval",
    "check_nonresonant", "frobenius_series", "fundamental_eval", "log_solution_eval",
    "theta_eval", "theta_prime_x",
]
