"""
Periods of bubble graphs and of triangle faces in two dimensions.

In the chart α_j = 1 with coordinate t = α_k / α_j the quadric reads
Ξ(1, t) = A + B t + C t², with roots u0, u1 = (−B ∓ √(B² − 4AC)) / (2C). The
simplex vertices sit at t = 0 and t = ∞ and the line L = V(α_j + α_k) at
t = −1.
"""

import logging
from typing import Literal, Mapping, Optional, Tuple

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict

import config
from graphkin import FeynmanGraph, require_one_loop
from polyalg import KPoly
from symanzik import symanzik

from . import (
    CoactionError,
    DegenerateQuadricError,
    UnsupportedConfigurationError,
    cross_ratio,
)
from .expr import SqrtExpr

# Configure module-specific logger
logger = logging.getLogger(__name__)

Variant = Literal["theta1", "theta2"]


class BubblePeriod(BaseModel):
    """
    A period written as prefactor · log(argument).

    For θ¹ the prefactor is 1/√(4|det C|) and the argument the cross-ratio
    [0 ∞ | u0 u1]; for θ² (scaled by 1/(x − y)) the prefactor is 1/(x − y)
    and the argument y/x, with x the chart coordinate of u1 and y = −1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    variant: Variant
    chart: Tuple[str, str]
    coefficients: Tuple[sp.Expr, sp.Expr, sp.Expr]
    roots: Tuple[SqrtExpr, SqrtExpr]
    x: SqrtExpr
    y: SqrtExpr
    prefactor: SqrtExpr
    argument: SqrtExpr

    def value(self, values: Mapping[sp.Symbol, sp.Rational], dps: int = config.common.DEFAULT_PRECISION) -> mp.mpc:
        from numeval import eval_expr

        with mp.workdps(dps):
            prefactor = eval_expr(self.prefactor, values, dps).value
            argument = eval_expr(self.argument, values, dps).value
            return prefactor * mp.log(argument)

    def root_form_value(
        self, values: Mapping[sp.Symbol, sp.Rational], dps: int = config.common.DEFAULT_PRECISION
    ) -> mp.mpc:
        """(1/(x − y)) log(y/x) in root coordinates, divided by C for θ¹."""
        from numeval import eval_expr

        with mp.workdps(dps):
            if self.variant == "theta1":
                x = eval_expr(self.roots[0], values, dps).value
                y = eval_expr(self.roots[1], values, dps).value
                leading = eval_expr(SqrtExpr(self.coefficients[2]), values, dps).value
                return mp.log(y / x) / ((x - y) * leading)
            x = eval_expr(self.x, values, dps).value
            y = eval_expr(self.y, values, dps).value
            return mp.log(y / x) / (x - y)


def _chart_coefficients(xi: KPoly, j: int, k: int) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    expr = xi.as_expr()
    alpha_j, alpha_k = xi.alphas[j], xi.alphas[k]
    poly = sp.Poly(expr, alpha_j, alpha_k)
    return (
        sp.expand(poly.coeff_monomial(alpha_j**2)),
        sp.expand(poly.coeff_monomial(alpha_j * alpha_k)),
        sp.expand(poly.coeff_monomial(alpha_k**2)),
    )


def face_period(
    xi: KPoly,
    edge_ids: Tuple[str, str],
    variant: Variant,
    chart_edge: Optional[str] = None,
) -> BubblePeriod:
    """
    Period of θ¹ or θ² for a two-variable quadric.

    Args:
        xi: Ξ of a bubble or of a triangle face, in exactly two α-variables
        edge_ids: Edge ids of the two variables, in α order
        variant: "theta1" or "theta2"
        chart_edge: Edge j of the chart α_j = 1; defaults to the first edge

    Raises:
        DegenerateQuadricError: If the quadric has a double root
    """
    if xi.arity != 2:
        raise CoactionError(f"a face quadric has two variables, got {xi.arity}")
    j = 0 if chart_edge is None else edge_ids.index(chart_edge)
    k = 1 - j
    A, B, C = _chart_coefficients(xi, j, k)
    disc = sp.expand(B**2 - 4 * A * C)
    if disc == 0:
        raise DegenerateQuadricError(f"double root on the face of edges {edge_ids}")
    if C == 0:
        raise DegenerateQuadricError(f"quadric root at infinity in the chart of edge {edge_ids[j]}")
    root = SqrtExpr(disc).sqrt()
    u0 = (SqrtExpr(-B) - root) / SqrtExpr(2 * C)
    u1 = (SqrtExpr(-B) + root) / SqrtExpr(2 * C)
    y = SqrtExpr(-1)

    if variant == "theta1":
        if A == 0:
            raise UnsupportedConfigurationError("θ¹ needs both roots away from the simplex vertices")
        prefactor = SqrtExpr(1) / SqrtExpr(sp.Abs(4 * A * C - B**2)).sqrt()
        argument = cross_ratio(0, sp.oo, u0, u1)
        x = u1
    elif variant == "theta2":
        x = SqrtExpr(-B / C) if A == 0 else u1
        prefactor = SqrtExpr(1) / (x - y)
        argument = y / x
    else:
        raise CoactionError(f"unknown period variant: {variant}")

    return BubblePeriod(
        variant=variant,
        chart=(edge_ids[j], edge_ids[k]),
        coefficients=(A, B, C),
        roots=(u0, u1),
        x=x,
        y=y,
        prefactor=prefactor,
        argument=argument,
    )


def bubble_period(g: FeynmanGraph, variant: Variant) -> BubblePeriod:
    """
    Period of a bubble graph: θ¹ needs two massive edges, θ² exactly one
    massless edge, which becomes the chart edge.

    Raises:
        UnsupportedConfigurationError: For the wrong mass pattern
        DegenerateQuadricError: For a double root
    """
    require_one_loop(g)
    if g.edge_count != 2:
        raise CoactionError(f"{g.name} is not a bubble")
    massless = [edge.id for edge in g.edges if not edge.is_massive]
    if variant == "theta1" and massless:
        raise UnsupportedConfigurationError(f"θ¹ needs two massive edges, {massless} are massless")
    if variant == "theta2" and len(massless) != 1:
        raise UnsupportedConfigurationError("θ² needs exactly one massless edge")
    chart_edge = massless[0] if variant == "theta2" else None
    period = face_period(symanzik(g).xi, g.edge_ids, variant, chart_edge)
    logger.debug(f"{g.name} {variant}: {period.prefactor.to_text()} * log({period.argument.to_text()})")
    return period


__all__ = ["BubblePeriod", "face_period", "bubble_period"]
