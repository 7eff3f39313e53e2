"""Modular gcd in Q(zeta_n)[x].

For a prime p = 1 mod n, Phi_n splits into distinct linear factors over F_p,
so Q(zeta_n) maps into F_p^phi(n) by sending zeta to each root.  Monic gcds of
the images are interpolated back in zeta, lifted over several primes by CRT
and rational reconstruction.  The cofactors are lifted from the same images,
and a result is accepted only when they multiply back exactly.

A prime is usable when it divides no input denominator and no leading
coefficient vanishes at any root; then the degree of every image gcd bounds
the true degree from above, so degree 0 certifies coprimality.
"""

import math
from functools import lru_cache

import flint

_PRIME_BITS = 62
_MAX_PRIMES = 60


@lru_cache(maxsize=None)
def _primes(n: int) -> tuple:
    """Primes p = 1 mod n below 2^62, descending."""
    out = []
    t = ((1 << _PRIME_BITS) - 1) // n
    while len(out) < _MAX_PRIMES:
        p = 1 + n * t
        if flint.fmpz(p).is_prime():
            out.append(p)
        t -= 1
    return tuple(out)


@lru_cache(maxsize=None)
def _vandermonde(n: int, p: int):
    """(V, V^-1) for V[k][i] = r_k^i over the roots r_k of Phi_n mod p."""
    from .polyq import cyclotomic

    phi = cyclotomic(n)
    img = flint.nmod_poly([int(c) for c in phi.coeffs()], p)
    roots = sorted(int(r) for r, _ in img.roots())
    deg = phi.degree()
    if len(roots) != deg:
        raise ArithmeticError(f"Phi_{n} does not split mod {p}")
    vand = flint.nmod_mat([[pow(r, i, p) for i in range(deg)] for r in roots], p)
    return vand, vand.inv()


def _integer_rows(poly, width):
    """Primitive integer multiple of poly as rows (x-degree) of q-coefficients."""
    coeffs = poly.coeffs()
    den = math.lcm(*[int(c.q) for c in coeffs])
    rows = [[0] * width for _ in range(poly.degrees()[0] + 1)]
    if den == 1:
        for (ex, eq), c in zip(poly.monoms(), coeffs):
            rows[ex][eq] = int(c.p)
    else:
        for (ex, eq), c in zip(poly.monoms(), coeffs):
            rows[ex][eq] = int(c.p) * (den // int(c.q))
    return rows, den


def _images(rows, vand, p):
    """Images in F_p[x], one per root of Phi_n."""
    cmat = flint.nmod_mat([[v % p for v in row] for row in rows], p)
    vals = vand * cmat.transpose()
    return [flint.nmod_poly([int(v) for v in row], p) for row in vals.tolist()]


def _ratrecon(u: int, m: int):
    """r/s = u mod m with |r|, s <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    u %= m
    if u <= bound:
        return flint.fmpq(u)
    if m - u <= bound:
        return flint.fmpq(u - m)
    r0, r1 = m, u
    s0, s1 = 0, 1
    while r1 > bound:
        quo = r0 // r1
        r0, r1 = r1, r0 - quo * r1
        s0, s1 = s1, s0 - quo * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    return flint.fmpq(r1, s1)


class _Lift:
    """CRT accumulator for one polynomial in (x, zeta) known mod several primes."""

    __slots__ = ("acc", "modulus")

    def __init__(self):
        self.acc = None
        self.modulus = 1

    def add(self, image, p):
        if self.acc is None:
            self.acc, self.modulus = image, p
            return
        m = self.modulus
        inv = pow(m, -1, p)
        new_mod = m * p
        self.acc = [
            [(u + m * (((v - u) * inv) % p)) % new_mod for u, v in zip(ru, rv)]
            for ru, rv in zip(self.acc, image)
        ]
        self.modulus = new_mod

    def reconstruct(self, ctx):
        m = self.modulus
        bound = math.isqrt(m // 2)
        # coefficients tend to share a denominator: carry it along so most of
        # them reconstruct as small integers
        den = 1
        terms = {}
        for i, row in enumerate(self.acc):
            for j, u in enumerate(row):
                if not u:
                    continue
                v = u * den % m
                if v <= bound:
                    terms[(j, i)] = flint.fmpq(v, den)
                elif m - v <= bound:
                    terms[(j, i)] = flint.fmpq(v - m, den)
                else:
                    r = _ratrecon(v, m)
                    if r is None:
                        return None
                    den *= int(r.q)
                    if den > bound:
                        return None
                    terms[(j, i)] = flint.fmpq(int(r.p), den)
        return ctx.from_dict(terms)


def _interpolate(polys_per_root, vinv, width):
    """q-coefficients (rows i) by x-degree (cols j) from per-root images."""
    vals = flint.nmod_mat(
        [[int(c) for c in f.coeffs()] + [0] * (width - f.degree() - 1) for f in polys_per_root],
        vinv.modulus(),
    )
    return [[int(v) for v in row] for row in (vinv * vals).tolist()]


def common_divisor(polys, plc):
    """Gcd of many polynomials via one combination, falling back to all of them."""
    if len(polys) > 2:
        phi = plc.phi_mpoly
        combo = polys[1]
        for k, f in enumerate(polys[2:], start=2):
            combo = combo + k * f
        combo = combo % phi
        if not combo.is_zero() and combo.degrees()[0] > 0:
            # a common divisor of den and combo that divides every entry is the gcd
            found = _common_divisor([polys[0], combo], plc, polys)
            if found is not None:
                return found
    return _common_divisor(polys, plc, polys)


def _common_divisor(gcd_of, plc, polys):
    """(g, [f / g for f in polys]) with g the monic gcd of ``gcd_of`` in Q(zeta_n)[x].

    Entries of ``gcd_of`` and ``polys`` are nonzero reduced residues, those of
    ``gcd_of`` of positive x-degree.  The cofactors are lifted from the same
    images as g and the result is accepted only if g * (f / g) = f mod Phi_n
    for every f, which certifies both.  Returns None when no prime in the
    table succeeds, or when g, the gcd of ``gcd_of``, fails to divide some f.
    """
    from .ratfun import CTX

    n = plc.n
    phi = plc.phi_mpoly
    width = plc.degree
    prepared = [_integer_rows(f, width) for f in gcd_of]
    rows = [r for r, _ in prepared]
    same = gcd_of is polys
    scaled = prepared if same else None
    best_deg = None
    lifts = None
    for p in _primes(n):
        vand, vinv = _vandermonde(n, p)
        images = [_images(r, vand, p) for r in rows]
        if any(img.degree() != len(r) - 1 for r, imgs in zip(rows, images) for img in imgs):
            continue
        gs = []
        for k in range(width):
            g = images[0][k]
            for imgs in images[1:]:
                if g.degree() == 0:
                    break
                g = g.gcd(imgs[k])
            gs.append(g)
        degs = {g.degree() for g in gs}
        if 0 in degs:
            # the gcd of all of polys divides the gcd of gcd_of
            return CTX.from_dict({(0, 0): 1}), list(polys)
        if len(degs) != 1:
            continue
        d = degs.pop()
        if best_deg is not None and d > best_deg:
            continue
        if scaled is None:
            scaled = [_integer_rows(f, width) for f in polys]
        cof_images = []
        for i, (r, _) in enumerate(scaled):
            per_root = []
            for img, g in zip(images[i] if same else _images(r, vand, p), gs):
                quo, rem = divmod(img, g)
                if not rem.is_zero():
                    if same:
                        break  # g_p divides every image here, so this prime is unlucky
                    return None
                per_root.append(quo)
            else:
                cof_images.append(per_root)
                continue
            break
        if len(cof_images) != len(polys):
            continue
        if best_deg is None or d < best_deg:
            best_deg = d
            lifts = [_Lift() for _ in range(len(polys) + 1)]
        lifts[0].add(_interpolate(gs, vinv, d + 1), p)
        for lift, (r, _), per_root in zip(lifts[1:], scaled, cof_images):
            lift.add(_interpolate(per_root, vinv, len(r) - d), p)
        g = lifts[0].reconstruct(CTX)
        if g is None:
            continue
        quotients = []
        for lift, (r, den), f in zip(lifts[1:], scaled, polys):
            quo = lift.reconstruct(CTX)
            if quo is None:
                break
            if den != 1:
                quo = quo / den
            if (g * quo - f) % phi != 0:
                break
            quotients.append(quo)
        else:
            return g, quotients
    return None
