"""Cyclotomic curvatures of linear q-difference modules.

Exact arithmetic over Q(q)(x) and Q(zeta_n)(x), curvature triviality scans,
diagonal Galois groups, q-deformations of differential modules, and certified
theta-function solutions.
"""

__version__ = "0.1.0"

from .curvature import (
    CurvatureReport, Verdict, curvature_at, good_place, ordered_product,
    prolongation_curvature, triviality_scan,
)
from .deformation import (
    DiffModule, SpecializedModule, deform, diff_curvature, diff_gauge, diff_module_new,
    diff_triviality_scan, specialize_q1, specialize_q_value,
)
from .galois import (
    DiagonalGroupDescription, RelationLattice, diagonal_galois_group, factor_constant,
    relation_lattice, verify_by_curvatures,
)
from .qmodule import (
    QDiffModule, construct, dual, direct_sum, gauge, iterate, module_new, prolong, tensor,
)
from .theta import (
    Ball, SeriesSolution, char_solution_eval, frobenius_series, fundamental_eval,
    log_solution_eval, theta_eval,
)

__all__ = [
    "Ball", "CurvatureReport", "DiagonalGroupDescription", "DiffModule", "QDiffModule",
    "RelationLattice", "SeriesSolution", "SpecializedModule", "Verdict", "char_solution_eval",
    "construct", "curvature_at", "deform", "diagonal_galois_group", "diff_curvature",
    "diff_gauge", "diff_module_new", "diff_triviality_scan", "direct_sum", "dual",
    "factor_constant", "frobenius_series", "fundamental_eval", "gauge", "good_place",
    "iterate", "log_solution_eval", "module_new", "ordered_product", "prolong",
    "prolongation_curvature", "relation_lattice", "specialize_q1", "specialize_q_value",
    "tensor", "theta_eval", "triviality_scan", "verify_by_curvatures",
]
