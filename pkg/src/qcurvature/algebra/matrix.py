"""Dense matrices over any of the exact fields, as tuples of tuples.

Elements must provide ``zero_like``/``one_like``/``is_zero``/``inverse``.
"""

from ..errors import SingularMatrix


def as_matrix(rows):
    m = tuple(tuple(r) for r in rows)
    if any(len(r) != len(m) for r in m):
        raise ValueError("matrix must be square")
    return m


def identity(n, one, zero):
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def identity_like(a):
    e = a[0][0]
    return identity(len(a), e.one_like(), e.zero_like())


def is_identity(a) -> bool:
    return all(
        (a[i][j].is_one() if i == j else a[i][j].is_zero())
        for i in range(len(a))
        for j in range(len(a))
    )


def mat_map(f, a):
    return tuple(tuple(f(e) for e in row) for row in a)


def transpose(a):
    return tuple(zip(*a))


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    zero = a[0][0].zero_like()
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = None
            for t in range(k):
                if ai[t].is_zero() or b[t][j].is_zero():
                    continue
                term = ai[t] * b[t][j]
                acc = term if acc is None else acc + term
            row.append(zero if acc is None else acc)
        out.append(tuple(row))
    return tuple(out)


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _pivot(rows, col, start):
    for r in range(start, len(rows)):
        if not rows[r][col].is_zero():
            return r
    return None


def det(a):
    n = len(a)
    rows = [list(r) for r in a]
    result = a[0][0].one_like()
    for c in range(n):
        p = _pivot(rows, c, c)
        if p is None:
            return a[0][0].zero_like()
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            result = -result
        piv = rows[c][c]
        result = result * piv
        inv = piv.inverse()
        for r in range(c + 1, n):
            if rows[r][c].is_zero():
                continue
            f = rows[r][c] * inv
            rows[r] = [rows[r][j] - f * rows[c][j] if j > c else rows[r][j] for j in range(n)]
    return result


def inverse(a):
    """Gauss-Jordan inverse; SingularMatrix if det(a) = 0."""
    n = len(a)
    one, zero = a[0][0].one_like(), a[0][0].zero_like()
    rows = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        p = _pivot(rows, c, c)
        if p is None:
            raise SingularMatrix("matrix is not invertible")
        rows[c], rows[p] = rows[p], rows[c]
        inv = rows[c][c].inverse()
        rows[c] = [e * inv if not e.is_zero() else e for e in rows[c]]
        for r in range(n):
            if r == c or rows[r][c].is_zero():
                continue
            f = rows[r][c]
            rows[r] = [
                rows[r][j] - f * rows[c][j] if not rows[c][j].is_zero() else rows[r][j]
                for j in range(2 * n)
            ]
    return tuple(tuple(r[n:]) for r in rows)


def kron(a, b):
    na, nb = len(a), len(b)
    return tuple(
        tuple(a[i // nb][j // nb] * b[i % nb][j % nb] for j in range(na * nb))
        for i in range(na * nb)
    )


def block_diag(a, b):
    zero = a[0][0].zero_like()
    na, nb = len(a), len(b)
    top = tuple(tuple(a[i]) + (zero,) * nb for i in range(na))
    bottom = tuple((zero,) * na + tuple(b[i]) for i in range(nb))
    return top + bottom


def block_upper(a, b, d):
    """[[a, b], [0, d]]."""
    zero = a[0][0].zero_like()
    n = len(a)
    top = tuple(tuple(a[i]) + tuple(b[i]) for i in range(n))
    bottom = tuple((zero,) * n + tuple(d[i]) for i in range(n))
    return top + bottom


def format_matrix(a):
    return [[str(e) for e in row] for row in a]
