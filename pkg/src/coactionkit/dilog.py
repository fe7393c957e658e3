"""
Coaction of the dilogarithm, its imaginary part on the unit circle, and the
dimensions of the weight-graded pieces of one-loop motives.
"""

import logging
from math import comb
from typing import List, Optional, Tuple

import sympy as sp

from . import CoactionError, CoactionTerm, Side
from .expr import SqrtExpr, as_sqrt_expr

# Configure module-specific logger
logger = logging.getLogger(__name__)

PROVENANCE = "dilog-coaction"
DIVERGENT_FLAG = "divergent-li1"


def _is_one(x: SqrtExpr) -> bool:
    return sp.simplify(x.resolved() - 1) == 0


def dilog_coaction(x) -> List[CoactionTerm]:
    """
    Li2^m(x) ⊗ L^dr + Li1^m(x) ⊗ log^dr(x) L^dr + 1 ⊗ Li2^dr(x).

    At x = 1 the motivic side of the middle term is a pole of Li1; the term
    is kept and flagged, never evaluated.
    """
    x = as_sqrt_expr(x)
    middle_flags: Tuple[str, ...] = ()
    if _is_one(x):
        logger.warning("Li1(1) diverges; middle term flagged")
        middle_flags = (DIVERGENT_FLAG,)
    return [
        CoactionTerm(
            motivic=Side(kind="li2", argument=x),
            derham=Side(kind="lefschetz"),
            weight=(4, 0),
            provenance=PROVENANCE,
        ),
        CoactionTerm(
            motivic=Side(kind="li1", argument=x),
            derham=Side(kind="log_lefschetz", argument=x),
            weight=(2, 2),
            provenance=PROVENANCE,
            flags=middle_flags,
        ),
        CoactionTerm(
            motivic=Side(kind="unit"),
            derham=Side(kind="li2", argument=x),
            weight=(0, 4),
            provenance=PROVENANCE,
        ),
    ]


def collapsed_log_argument(z) -> SqrtExpr:
    """−(1 − z)²/z, the argument that absorbs Li1(z) + Li1(1/z)."""
    z = as_sqrt_expr(z)
    return -((1 - z) ** 2) / z


def im_dilog_coaction(z) -> List[CoactionTerm]:
    """
    Coaction of Im Li2(z) = (Li2(z) − Li2(1/z)) / 2i for unimodular z.

    The two weight-2 middle terms collapse into one, since
    Li1(z) ⊗ log z − Li1(1/z) ⊗ log(1/z) = −log(−(1 − z)²/z) ⊗ log z.
    """
    z = as_sqrt_expr(z)
    if z.is_syntactic_zero():
        raise CoactionError("Im Li2 needs a unimodular argument, got 0")
    half_over_i = 1 / (2 * sp.I)
    text = z.to_text()
    return [
        CoactionTerm(
            motivic=Side(kind="period", label=f"ImLi2^m({text})"),
            derham=Side(kind="lefschetz"),
            weight=(4, 0),
            provenance=f"{PROVENANCE} imaginary part",
        ),
        CoactionTerm(
            motivic=Side(kind="log", argument=collapsed_log_argument(z), coefficient=-half_over_i),
            derham=Side(kind="log_lefschetz", argument=z),
            weight=(2, 2),
            provenance=f"{PROVENANCE} imaginary part",
        ),
        CoactionTerm(
            motivic=Side(kind="unit"),
            derham=Side(kind="period", label=f"ImLi2^dr({text})"),
            weight=(0, 4),
            provenance=f"{PROVENANCE} imaginary part",
        ),
    ]


def weight_collapse_residual(z: Optional[sp.Expr] = None) -> sp.Expr:
    """
    (1 − z)(1 − 1/z) / (−(1 − z)²/z) − 1, simplified.

    Zero exactly when the two Li1 arguments multiply to the collapsed log
    argument, which is the weight-2 identity behind im_dilog_coaction.
    """
    z = sp.Symbol("z") if z is None else sp.sympify(z)
    product = (1 - z) * (1 - 1 / z)
    return sp.simplify(sp.cancel(product / collapsed_log_argument(z).expr) - 1)


def weight_graded_dims(n: int, vanishing: Optional[int] = None) -> Tuple[int, ...]:
    """
    Dimensions of the weight-graded pieces gr^W_0, gr^W_2, gr^W_4[, gr^W_6]
    of the motive of an n-edge one-loop graph with generic kinematics.

    Args:
        n: Number of edges, n ≥ 3
        vanishing: For a triangle, the number of massless edges v; returns
            (1, 5 − v, 1)

    Raises:
        CoactionError: For out-of-range n or v
    """
    if vanishing is not None:
        if n != 3:
            raise CoactionError(f"the vanishing-mass variant is for triangles, got n={n}")
        if vanishing not in (0, 1, 2, 3):
            raise CoactionError(f"number of vanishing masses must be in 0..3, got {vanishing}")
        return (1, 5 - vanishing, 1)

    if n < 3:
        raise CoactionError(f"edge count must be at least 3, got {n}")

    def binomial(k: int) -> int:
        return comb(n + 1, k) if k >= 0 else 0

    dims = (1, binomial(n - 1), binomial(n - 3))
    if n <= 4:
        return dims
    return dims + (binomial(n - 5) - binomial(n - 6),)


__all__ = [
    "DIVERGENT_FLAG",
    "dilog_coaction",
    "im_dilog_coaction",
    "collapsed_log_argument",
    "weight_collapse_residual",
    "weight_graded_dims",
]
