"""v-curvatures at cyclotomic places and the curvature triviality scan.

At the place of Phi_n, q reduces to a primitive n-th root of unity zeta and the
curvature of a module with Sigma-matrix A is the ordered product

    C_n = red(A)(x) red(A)(zeta x) ... red(A)(zeta^{n-1} x)

in Q(zeta_n)(x).  For an iterated module (operator x -> q^s x) the exponent is
the order of zeta^s, n / gcd(n, s).
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .algebra import place as get_place
from .algebra import reduce_at_place, CyclotomicPlace
from .algebra import matrix as mx
from .algebra.fracmat import FracMatrix
from .algebra.ratfun import format_mpoly
from .errors import BadPlace, BadReduction, NoGoodPlaces

DEFAULT_THRESHOLD = 3
DEFAULT_RANGE = (1, 50)

CONSISTENT = "consistent_with_trivial"
NONTRIVIAL = "nontrivial_heuristic"


@dataclass(frozen=True)
class PlaceStatus:
    place: CyclotomicPlace
    good: bool
    witness: str = None

    @property
    def n(self):
        return self.place.n


class CurvatureReport:
    """Curvature at one place; ``fmatrix`` is exact, ``matrix`` its canonical entries."""

    def __init__(self, place_: CyclotomicPlace, fmatrix: FracMatrix):
        self.place = place_
        self.fmatrix = fmatrix
        self.is_identity = fmatrix.is_identity()

    @property
    def n(self):
        return self.place.n

    @property
    def matrix(self):
        return self.fmatrix.entries

    def __repr__(self):
        return f"CurvatureReport(n={self.n}, is_identity={self.is_identity})"


@dataclass
class Verdict:
    n_min: int
    n_max: int
    threshold: int
    good_places: int = 0
    identity_places: int = 0
    bad_places: list = field(default_factory=list)
    failure_places: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def conclusion(self) -> str:
        if len(self.failure_places) >= self.threshold:
            return NONTRIVIAL
        return CONSISTENT

    @property
    def failures(self) -> int:
        return len(self.failure_places)


def _reduce_matrix(a, plc):
    return mx.mat_map(lambda e: reduce_at_place(e, plc), a)


def _status_from_matrix(a, det, n) -> PlaceStatus:
    plc = get_place(n)
    for i, row in enumerate(a):
        for j, e in enumerate(row):
            if (e.den % plc.phi_mpoly).is_zero():
                return PlaceStatus(plc, False, f"A[{i}][{j}] denominator {format_mpoly(e.den)}")
    try:
        rdet = reduce_at_place(det, plc)
    except BadReduction:
        return PlaceStatus(plc, False, f"det(A) denominator {format_mpoly(det.den)}")
    if rdet.is_zero():
        return PlaceStatus(plc, False, f"det(A) = {det} vanishes")
    return PlaceStatus(plc, True)


def good_place(m, n: int) -> PlaceStatus:
    """good iff every entry of A and det(A) reduce mod Phi_n with det nonzero."""
    if n < 1:
        raise ValueError("place index must be >= 1")
    return _status_from_matrix(m.sigma_matrix, m.det, n)


def curvature_exponent(n: int, step: int) -> int:
    return n // math.gcd(n, step)


def ordered_product(r, n: int, step: int = 1) -> FracMatrix:
    """r(x) r(zeta^s x) ... r(zeta^{s(k-1)} x) for k the order of zeta^s.

    ``r`` is a FracMatrix or a matrix of CycRatFun at the place of Phi_n.
    """
    if not isinstance(r, FracMatrix):
        r = FracMatrix.from_entries(get_place(n), r)
    k = curvature_exponent(n, step)
    r = r.cancel()
    # T_m = r(x) ... r(zeta^{s(m-1)} x) obeys T_2m(x) = T_m(x) T_m(zeta^{sm} x)
    # and T_{m+1}(x) = T_m(x) r(zeta^{sm} x): O(log k) products
    out, m = r, 1
    for bit in bin(k)[3:]:
        out = (out @ out.sigma_root(step * m)).cancel()
        m *= 2
        if bit == "1":
            out = (out @ r.sigma_root(step * m)).cancel()
            m += 1
    return out


def curvature_at(m, n: int) -> CurvatureReport:
    status = good_place(m, n)
    if not status.good:
        raise BadPlace(n, status.witness)
    r = _reduce_matrix(m.sigma_matrix, status.place)
    return CurvatureReport(status.place, ordered_product(r, n, m.step))


def prolongation_curvature(m, n: int) -> CurvatureReport:
    from .qmodule import prolong

    return curvature_at(prolong(m), n)


def _scan_one(m, n):
    status = good_place(m, n)
    if not status.good:
        return n, status, None
    r = _reduce_matrix(m.sigma_matrix, status.place)
    return n, status, CurvatureReport(status.place, ordered_product(r, n, m.step))


def aggregate(results, n_min, n_max, threshold) -> Verdict:
    """Fold (n, status, report) triples, ascending n, into a Verdict."""
    verdict = Verdict(n_min, n_max, threshold)
    for n, status, report in sorted(results, key=lambda r: r[0]):
        if not status.good:
            verdict.bad_places.append((n, status.witness))
            continue
        verdict.good_places += 1
        if report.is_identity:
            verdict.identity_places += 1
        else:
            verdict.failure_places.append(n)
        verdict.details[n] = report
    if verdict.good_places == 0:
        raise NoGoodPlaces(f"no good place in {n_min}..{n_max}")
    return verdict


def place_range(n_min, n_max, exclude_n1=False):
    if n_min > n_max:
        raise ValueError("n_min must be <= n_max")
    if n_min < 1:
        raise ValueError("place indices start at 1")
    return [n for n in range(n_min, n_max + 1) if not (exclude_n1 and n == 1)]


def triviality_scan(m, n_min=DEFAULT_RANGE[0], n_max=DEFAULT_RANGE[1],
                    threshold=DEFAULT_THRESHOLD, exclude_n1=False, executor=None) -> Verdict:
    """Curvature scan over places n_min..n_max.

    ``executor`` (a concurrent.futures executor) evaluates places concurrently;
    aggregation is always in ascending n, so the verdict is independent of it.
    """
    ns = place_range(n_min, n_max, exclude_n1)
    if executor is None:
        results = [_scan_one(m, n) for n in ns]
    else:
        exported = _export(m)
        results = [_rebuild(r) for r in executor.map(_scan_remote, [(exported, n) for n in ns])]
    return aggregate(results, n_min, n_max, threshold)


def _export(m):
    return [[str(e) for e in row] for row in m.sigma_matrix], m.step


def _scan_remote(args):
    # flint objects do not pickle: ship printed expressions both ways
    from .qmodule import module_new

    (rows, step), n = args
    return _payload(_scan_one(module_new(rows, step), n))


def _payload(result):
    n, status, report = result
    if report is None:
        return n, status.witness, None
    return n, None, mx.format_matrix(report.matrix)


def _rebuild(payload):
    """Printed residues use q for zeta_n, so parsing then reducing is exact."""
    from .algebra import parse_ratfun

    n, witness, rows = payload
    plc = get_place(n)
    if rows is None:
        return n, PlaceStatus(plc, False, witness), None
    c = [[reduce_at_place(parse_ratfun(e), plc) for e in row] for row in rows]
    return n, PlaceStatus(plc, True), CurvatureReport(plc, FracMatrix.from_entries(plc, c))


def make_executor(workers=None):
    return ProcessPoolExecutor(max_workers=workers)
