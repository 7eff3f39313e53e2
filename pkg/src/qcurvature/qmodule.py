"""q-difference modules over Q(q)(x) in a fixed basis.

We store the matrix A of Sigma_q (Sigma_q e = e A).  Horizontal vectors, i.e.
solutions of the associated system, satisfy Y(qx) = A(x)^{-1} Y(x); that
matrix is exposed as :attr:`QDiffModule.system_matrix`.

The matrix of Sigma_q^t is the ordered product A(x) A(qx) ... A(q^{t-1} x),
from Sigma_q^2 e = Sigma_q(e A) = e A sigma_q(A).
"""

from dataclasses import dataclass, field
from functools import cached_property

from .algebra import RatFun, parse_ratfun
from .algebra import matrix as mx
from .errors import SingularMatrix


def _to_ratfun(e):
    if isinstance(e, RatFun):
        return e
    if isinstance(e, str):
        return parse_ratfun(e)
    return RatFun(e)


def ratfun_matrix(rows):
    return mx.as_matrix([[_to_ratfun(e) for e in row] for row in rows])


@dataclass(frozen=True)
class QDiffModule:
    """Module with Sigma-matrix A for the operator x -> q^step x (step 1 unless iterated)."""

    sigma_matrix: tuple
    step: int = 1
    _det: object = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.sigma_matrix)

    @cached_property
    def det(self) -> RatFun:
        return self._det if self._det is not None else mx.det(self.sigma_matrix)

    @cached_property
    def system_matrix(self):
        """A^{-1}: solutions satisfy Y(q^step x) = A^{-1} Y(x)."""
        return mx.inverse(self.sigma_matrix)

    def sigma(self, f: RatFun) -> RatFun:
        return f.sigma(self.step)

    def __str__(self):
        return str(mx.format_matrix(self.sigma_matrix))


def module_new(a, step: int = 1) -> QDiffModule:
    """Validate det(A) != 0 and wrap A (entries: RatFun, strings or numbers)."""
    a = ratfun_matrix(a)
    if not a:
        raise ValueError("empty matrix")
    d = mx.det(a)
    if d.is_zero():
        raise SingularMatrix("det(A) = 0 in Q(q)(x)")
    return QDiffModule(a, step, d)


def _check_steps(mods):
    steps = {m.step for m in mods}
    if len(steps) != 1:
        raise ValueError("operands are modules over different operators")
    return steps.pop()


def dual(m: QDiffModule) -> QDiffModule:
    return QDiffModule(mx.transpose(m.system_matrix), m.step)


def tensor(m: QDiffModule, n: QDiffModule) -> QDiffModule:
    step = _check_steps([m, n])
    return QDiffModule(mx.kron(m.sigma_matrix, n.sigma_matrix), step)


def direct_sum(m: QDiffModule, n: QDiffModule) -> QDiffModule:
    step = _check_steps([m, n])
    return QDiffModule(mx.block_diag(m.sigma_matrix, n.sigma_matrix), step)


def construct(kind: str, *operands: QDiffModule) -> QDiffModule:
    if kind == "dual":
        (m,) = operands
        return dual(m)
    if kind in ("tensor", "direct_sum"):
        if len(operands) < 2:
            raise ValueError(f"{kind} needs at least two operands")
        op = tensor if kind == "tensor" else direct_sum
        out = operands[0]
        for m in operands[1:]:
            out = op(out, m)
        return out
    raise ValueError(f"unknown construction {kind!r}")


def derive_matrix(a):
    return mx.mat_map(lambda e: e.derive(), a)


def prolong(m: QDiffModule) -> QDiffModule:
    """Prolongation: basis (e, de) with Sigma-matrix [[A, dA], [0, A]], d = x d/dx."""
    a = m.sigma_matrix
    return QDiffModule(mx.block_upper(a, derive_matrix(a), a), m.step)


def sigma_matrix_power(a, step: int, t: int):
    """A(x) A(q^step x) ... A(q^{step (t-1)} x)."""
    out = a
    for i in range(1, t):
        shifted = mx.mat_map(lambda e: e.sigma(i * step), a)
        out = mx.mat_mul(out, shifted)
    return out


def iterate(m: QDiffModule, t: int) -> QDiffModule:
    """Module of Sigma_q^t, whose operator substitutes x -> q^(step*t) x."""
    if t < 1:
        raise ValueError("iterate needs t >= 1")
    if t == 1:
        return m
    return QDiffModule(sigma_matrix_power(m.sigma_matrix, m.step, t), m.step * t)


def gauge(m: QDiffModule, p) -> QDiffModule:
    """Change of basis e' = e P: new Sigma-matrix P^{-1} A sigma(P)."""
    p = ratfun_matrix(p)
    if mx.det(p).is_zero():
        raise SingularMatrix("gauge matrix is singular")
    p_inv = mx.inverse(p)
    p_shift = mx.mat_map(m.sigma, p)
    return QDiffModule(mx.mat_mul(mx.mat_mul(p_inv, m.sigma_matrix), p_shift), m.step)


def prolong_gauge(p):
    """Gauge matrix on the prolongation induced by P: [[P, dP], [0, P]]."""
    p = ratfun_matrix(p)
    return mx.block_upper(p, derive_matrix(p), p)
