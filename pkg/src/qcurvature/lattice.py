"""Integer lattices in Z^nu: kernels, canonical bases, Smith form, saturation.

A lattice is given by a list of integer row vectors.  The canonical basis is
the Hermite form taken with the coordinates read right to left, so each vector
ends in a positive pivot and pivots sit in distinct columns.
"""

import flint


def _nonzero_rows(mat):
    return [row for row in mat if any(row)]


def _to_int_rows(mat):
    return [[int(v) for v in row] for row in mat.tolist()]


def hnf_rows(rows, ncols):
    """Row Hermite normal form, zero rows dropped."""
    if not rows:
        return []
    return _nonzero_rows(_to_int_rows(flint.fmpz_mat(rows).hnf()))


def canonical_basis(rows, ncols):
    """Basis of the lattice spanned by rows, pivots read from the right.

    Vectors come ordered by pivot column, left to right.
    """
    flipped = [list(reversed(r)) for r in rows]
    h = hnf_rows(flipped, ncols)
    return [list(reversed(r)) for r in reversed(h)]


def integer_kernel(mat, ncols):
    """Basis of {m in Z^ncols : mat m = 0}, canonical.

    Row-reduce [mat^T | I]: unimodular row operations keep the right block a
    basis change, and rows whose left block vanishes span the kernel.
    """
    nrows = len(mat)
    if nrows == 0:
        return canonical_basis([[int(i == j) for j in range(ncols)] for i in range(ncols)], ncols)
    aug = [[mat[r][c] for r in range(nrows)] + [int(i == c) for i in range(ncols)] for c in range(ncols)]
    h = _to_int_rows(flint.fmpz_mat(aug).hnf())
    kernel = [row[nrows:] for row in h if not any(row[:nrows]) and any(row[nrows:])]
    return canonical_basis(kernel, ncols)


def rank(rows) -> int:
    if not rows:
        return 0
    return flint.fmpz_mat(rows).rank()


def smith_diagonal(rows, ncols) -> list:
    """Nonzero elementary divisors of the lattice spanned by rows."""
    if not rows:
        return []
    s = _to_int_rows(flint.fmpz_mat(rows).snf())
    out = []
    for i in range(min(len(s), ncols)):
        if s[i][i]:
            out.append(abs(s[i][i]))
    return out


def saturation(rows, ncols):
    """(Q-span of rows) meet Z^ncols, as a canonical basis."""
    if not rows:
        return []
    perp = integer_kernel(rows, ncols)
    return integer_kernel(perp, ncols)


def contains(basis, m) -> bool:
    """Membership of m in the lattice with canonical basis ``basis``."""
    rest = list(m)
    # pivots (last nonzero entries) strictly increase along the basis
    for vec in reversed(basis):
        j = max(i for i, v in enumerate(vec) if v)
        coeff, r = divmod(rest[j], vec[j])
        if r:
            return False
        if coeff:
            rest = [a - coeff * b for a, b in zip(rest, vec)]
    return not any(rest)
