"""Differential modules and their q-deformation.

A differential module has matrix G over Q(x) with nabla(e) = e G for
nabla = d/dx.  Its q-deformation is the q-difference module with
Sigma-matrix A = I + (q-1) x G(x); conversely Delta_q = (Sigma_q - 1)/(q-1)
recovers x G at q = 1.

At the place of Phi_n the curvature of the deformation is
prod_i (I + (zeta-1) zeta^i x G(zeta^i x)), i.e. the ordered product of
R(x) = I + (zeta-1) x G(x), which is computed directly over Q(zeta_n)(x).
"""

from dataclasses import dataclass
from fractions import Fraction

from .algebra import RatFun, reduce_at_place, place as get_place
from .algebra import matrix as mx
from .algebra.fracmat import FracMatrix
from .algebra.polyq import to_fraction
from .curvature import (
    DEFAULT_RANGE, DEFAULT_THRESHOLD, CurvatureReport, PlaceStatus, aggregate,
    ordered_product, place_range,
)
from .errors import (
    BadPlace, BadSpecialization, DivisionByZero, NotSpecializable, SingularMatrix,
)
from .qmodule import QDiffModule, module_new, ratfun_matrix


@dataclass(frozen=True)
class DiffModule:
    """nabla(e) = e G with respect to d/dx; horizontal vectors solve Y' = -G Y."""

    g_matrix: tuple

    @property
    def dim(self) -> int:
        return len(self.g_matrix)

    def __str__(self):
        return str(mx.format_matrix(self.g_matrix))


def diff_module_new(g) -> DiffModule:
    """Wrap G (entries: RatFun, strings or numbers) after checking it is free of q."""
    g = ratfun_matrix(g)
    if not g:
        raise ValueError("empty matrix")
    for i, row in enumerate(g):
        for j, e in enumerate(row):
            if e.has_q():
                raise ValueError(f"G[{i}][{j}] = {e} depends on q")
    return DiffModule(g)


@dataclass(frozen=True)
class SpecializedModule:
    matrix: tuple  # over Q(x)
    q_value: Fraction
    root_of_unity: bool

    @property
    def dim(self) -> int:
        return len(self.matrix)


def _q_minus_one_x():
    return (RatFun.q() - 1) * RatFun.x()


def deform(d: DiffModule) -> QDiffModule:
    """A = I + (q-1) x G; det(A) = 1 mod (q-1), so A is always invertible."""
    t = _q_minus_one_x()
    a = mx.mat_add(
        mx.identity_like(d.g_matrix),
        mx.mat_map(lambda e: t * e, d.g_matrix),
    )
    return module_new(a)


def specialize_q1(m: QDiffModule) -> DiffModule:
    """G = (A - I) / ((q-1) x) at q = 1."""
    if m.step != 1:
        raise NotSpecializable("module", "iterated modules have no q = 1 specialization")
    t = _q_minus_one_x()
    a = m.sigma_matrix
    rows = []
    for i, row in enumerate(a):
        out = []
        for j, e in enumerate(row):
            h = (e - 1 if i == j else e) / t
            try:
                out.append(h.subs_q(1))
            except DivisionByZero:
                raise NotSpecializable(
                    f"A[{i}][{j}] = {e}", "(A - I)/((q-1)x) has a pole at q = 1"
                ) from None
        rows.append(out)
    return DiffModule(mx.as_matrix(rows))


def specialize_q_value(m: QDiffModule, a) -> SpecializedModule:
    """Substitute q = a in A; BadSpecialization at poles or if det vanishes."""
    a = to_fraction(a)
    if a == 0:
        raise BadSpecialization("q = 0 is not allowed")
    rows = []
    for i, row in enumerate(m.sigma_matrix):
        out = []
        for j, e in enumerate(row):
            try:
                out.append(e.subs_q(a))
            except DivisionByZero:
                raise BadSpecialization(f"A[{i}][{j}] = {e} has a pole at q = {a}") from None
        rows.append(out)
    specialized = mx.as_matrix(rows)
    if mx.det(specialized).is_zero():
        raise BadSpecialization(f"det(A) vanishes at q = {a}")
    return SpecializedModule(specialized, a, a in (1, -1))


def diff_gauge(d: DiffModule, p) -> DiffModule:
    """Change of basis e' = e P: new matrix P^{-1} (G P + dP/dx).

    Triviality is a statement about some basis, so the curvature criterion is
    meant to be applied after a suitable gauge (G = [k/x] needs P = [x^-k]).
    """
    p = ratfun_matrix(p)
    if mx.det(p).is_zero():
        raise SingularMatrix("gauge matrix is singular")
    x = RatFun.x()
    dp = mx.mat_map(lambda e: e.derive() / x, p)
    g = mx.mat_mul(mx.inverse(p), mx.mat_add(mx.mat_mul(d.g_matrix, p), dp))
    return DiffModule(g)


def _deformation_factor(d: DiffModule, n: int):
    """R = I + (zeta-1) x G over Q(zeta_n)(x); the rows of red(deform(D))."""
    plc = get_place(n)
    zx = reduce_at_place(_q_minus_one_x(), plc)
    rows = []
    for i, row in enumerate(d.g_matrix):
        out = []
        for j, e in enumerate(row):
            v = zx * reduce_at_place(e, plc)
            out.append(v + 1 if i == j else v)
        rows.append(out)
    return plc, rows


def _diff_status(d: DiffModule, n: int):
    plc, rows = _deformation_factor(d, n)
    # entries of G never lose their denominators mod Phi_n (they are free of
    # q), so the only obstruction is a vanishing determinant
    if mx.det(mx.as_matrix(rows)).is_zero():
        return PlaceStatus(plc, False, "det(A) vanishes"), None
    return PlaceStatus(plc, True), rows


def diff_curvature(d: DiffModule, n: int) -> CurvatureReport:
    """prod_{i=0}^{n-1} (I + (zeta-1) zeta^i x G(zeta^i x)), i = 0 leftmost."""
    status, rows = _diff_status(d, n)
    if not status.good:
        raise BadPlace(n, status.witness)
    r = FracMatrix.from_entries(status.place, rows)
    return CurvatureReport(status.place, ordered_product(r, n))


def _diff_scan_one(d, n):
    status, rows = _diff_status(d, n)
    if not status.good:
        return n, status, None
    r = FracMatrix.from_entries(status.place, rows)
    return n, status, CurvatureReport(status.place, ordered_product(r, n))


def _diff_scan_remote(args):
    from .curvature import _payload

    rows, n = args
    return _payload(_diff_scan_one(diff_module_new(rows), n))


def diff_triviality_scan(d: DiffModule, n_min=DEFAULT_RANGE[0], n_max=DEFAULT_RANGE[1],
                         threshold=DEFAULT_THRESHOLD, exclude_n1=False, executor=None):
    """Curvature scan of the deformation, aggregated as the q-difference scan."""
    from .curvature import _rebuild

    ns = place_range(n_min, n_max, exclude_n1)
    if executor is None:
        results = [_diff_scan_one(d, n) for n in ns]
    else:
        rows = [[str(e) for e in row] for row in d.g_matrix]
        results = [_rebuild(r) for r in executor.map(_diff_scan_remote, [(rows, n) for n in ns])]
    return aggregate(results, n_min, n_max, threshold)


__all__ = [
    "DiffModule", "SpecializedModule", "deform", "diff_curvature", "diff_gauge", "diff_module_new",
    "diff_triviality_scan", "specialize_q1", "specialize_q_value",
]
