from .cyclo import (
    CycNum, CycRatFun, CyclotomicPlace, place, reduce_at_place, reduce_constant,
)
from .parse import format_ratfun, parse_ratfun
from .polyq import PolyQ, RatQ, cyclotomic
from .ratfun import RatFun, dlog_derive, sigma_q

__all__ = [
    "CycNum", "CycRatFun", "CyclotomicPlace", "PolyQ", "RatFun", "RatQ",
    "cyclotomic", "dlog_derive", "format_ratfun", "parse_ratfun", "place",
    "reduce_at_place", "reduce_constant", "sigma_q",
]
