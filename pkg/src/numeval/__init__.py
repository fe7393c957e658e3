"""
High-precision evaluation: dilogarithms, the Clausen function, algebraic
expressions, the 42-dilogarithm box formula and simplex quadrature.
"""

import logging
from typing import Mapping, Optional, Union

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict

import config
from graphkin import FeynmanGraph, KinematicPoint

# Configure module-specific logger
logger = logging.getLogger(__name__)


class NumevalError(Exception):
    """Base exception for numerical evaluation"""

    pass


class PrecisionLimitError(NumevalError):
    """Raised when the requested precision exceeds the configured maximum"""

    pass


class NegativeRadicandError(NumevalError):
    """Raised when a real square root meets a negative radicand"""

    pass


class NumericZeroDivisionError(NumevalError):
    """Raised when an expression divides by a numeric zero"""

    pass


class DivergentIntegralError(NumevalError):
    """Raised when an integrand is not integrable over the simplex"""

    pass


class NonEuclideanError(NumevalError):
    """Raised when quadrature is requested off the Euclidean sheet"""

    pass


def _check_precision(dps: int) -> None:
    if dps > config.common.MAX_PRECISION:
        raise PrecisionLimitError(
            f"{dps} digits requested, configured maximum is {config.common.MAX_PRECISION}"
        )


def li2(z, dps: int = config.common.DEFAULT_PRECISION) -> mp.mpc:
    """Li₂(z) on the principal branch, cut along [1, ∞)."""
    _check_precision(dps)
    with mp.workdps(dps):
        return mp.mpmathify(mp.polylog(2, z))


def im_li2_unit(theta, dps: int = config.common.DEFAULT_PRECISION) -> mp.mpf:
    """Im Li₂(e^{iθ}), the Clausen function Cl₂(θ)."""
    _check_precision(dps)
    with mp.workdps(dps):
        return mp.clsin(2, theta)


class ExprValue(BaseModel):
    """Value of an algebraic expression and whether a radicand went negative."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: mp.mpc
    negative_radicand: bool
    precision: int

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0


def to_mpc(number: sp.Expr, dps: int) -> mp.mpc:
    """Exact sympy number to an mpmath complex at dps digits."""
    evaluated = sp.N(number, dps + 5)
    re, im = evaluated.as_real_imag()
    return mp.mpc(mp.mpf(str(sp.Float(re, dps + 5))), mp.mpf(str(sp.Float(im, dps + 5))))


def eval_expr(
    e,
    p: Union[KinematicPoint, Mapping[sp.Symbol, sp.Rational]],
    dps: int = config.common.DEFAULT_PRECISION,
    graph: Optional[FeynmanGraph] = None,
    warn: bool = True,
) -> ExprValue:
    """
    Evaluate a SqrtExpr (or plain sympy expression) at a kinematic point.

    Args:
        e: Expression to evaluate
        p: Kinematic point (then `graph` is required) or symbol values
        dps: Decimal digits
        graph: Graph whose invariants the point assigns
        warn: Log a warning on negative radicands, else a debug record

    Raises:
        NumericZeroDivisionError: If a denominator evaluates to zero
    """
    _check_precision(dps)
    if isinstance(p, KinematicPoint):
        if graph is None:
            raise NumevalError("a graph is required to read a KinematicPoint")
        values = p.substitutions(graph)
    else:
        values = dict(p)
    resolved = e.resolved() if hasattr(e, "resolved") else sp.sympify(e)
    exact = resolved.xreplace(values)
    if exact.free_symbols:
        missing = sorted(s.name for s in exact.free_symbols)
        raise NumevalError(f"unassigned symbols: {missing}")
    if exact.has(sp.zoo, sp.nan, sp.oo, -sp.oo):
        raise NumericZeroDivisionError(f"division by zero evaluating {e}")

    negative = False
    for power in resolved.atoms(sp.Pow):
        if power.exp.is_Rational and power.exp.q == 2:
            radicand = power.base.xreplace(values)
            if radicand.is_extended_real and radicand.is_negative:
                negative = True
    with mp.workdps(dps):
        value = to_mpc(exact, dps)
    if negative:
        log = logger.warning if warn else logger.debug
        log("Negative radicand while evaluating an algebraic expression")
    return ExprValue(value=value, negative_radicand=negative, precision=dps)


from .quadrature import QuadratureResult, parametric_quadrature, simplex_quadrature  # noqa: E402
from .box import OWTerm, OWEvaluation, ow_box_value, ow_quadric_value, ow_terms  # noqa: E402

__all__ = [
    "NumevalError",
    "PrecisionLimitError",
    "NegativeRadicandError",
    "NumericZeroDivisionError",
    "DivergentIntegralError",
    "NonEuclideanError",
    "ExprValue",
    "to_mpc",
    "QuadratureResult",
    "OWTerm",
    "OWEvaluation",
    "li2",
    "im_li2_unit",
    "eval_expr",
    "parametric_quadrature",
    "simplex_quadrature",
    "ow_box_value",
    "ow_quadric_value",
    "ow_terms",
]
