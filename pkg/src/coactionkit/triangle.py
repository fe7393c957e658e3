"""
Coaction of the four-dimensional triangle for every pattern of vanishing
masses, the conic/line geometry of the massless triangle, and blow-up charts
at the points where the quadric meets a simplex vertex.

Throughout, q_i² denotes the coefficient of α_jα_k in Φ for {i, j, k} =
{1, 2, 3}, and D_i = V(α_i).
"""

import itertools
import logging
from typing import Dict, List, Mapping, Optional, Tuple

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict

import config
from graphkin import FeynmanGraph, KinematicPoint, require_one_loop, validate_generic
from polyalg import KPoly
from symanzik import build_integrand, symanzik

from . import (
    ChartError,
    Coaction,
    CoactionError,
    CoactionTerm,
    Side,
    UnsupportedConfigurationError,
    cross_ratio,
    outer_terms,
)
from .bubble import BubblePeriod, face_period
from .expr import SqrtExpr

# Configure module-specific logger
logger = logging.getLogger(__name__)

MARKERS = (sp.Symbol("a_1"), sp.Symbol("a_2"))


def _require_triangle(g: FeynmanGraph) -> None:
    require_one_loop(g)
    if g.edge_count != 3:
        raise CoactionError(f"{g.name} is not a triangle")


def _pair_coefficients(phi: KPoly) -> Dict[int, sp.Expr]:
    """q_i² for i = 0, 1, 2: the coefficient of α_jα_k in Φ."""
    poly = sp.Poly(phi.as_expr(), *phi.alphas)
    result = {}
    for i in range(3):
        j, k = (x for x in range(3) if x != i)
        result[i] = sp.expand(poly.coeff_monomial(phi.alphas[j] * phi.alphas[k]))
    return result


def _face_term(
    g: FeynmanGraph, xi: KPoly, face: int, variant: str, chart_edge: Optional[str] = None
) -> Tuple[BubblePeriod, CoactionTerm]:
    keep = tuple(e for position, e in enumerate(g.edge_ids) if position != face)
    period = face_period(xi.restrict([face]), keep, variant, chart_edge)
    index = 1 if variant == "theta1" else 2
    edge = g.edge_ids[face]
    term = CoactionTerm(
        motivic=Side(
            kind="log",
            prefactor=period.prefactor,
            argument=period.argument,
            label=f"I_{g.name}/{edge}(theta{index})",
        ),
        derham=Side(kind="period", label=f"[mot_{g.name}, (omega^{index}_{face + 1})^v, omega_{g.name}]^dr"),
        weight=(2, 2),
        provenance=f"triangle face {edge} theta{index}",
    )
    return period, term


def _massless_terms(g: FeynmanGraph) -> Tuple[List[CoactionTerm], List[str]]:
    geometry = massless_geometry(g)
    combination = tuple(zip(MARKERS, geometry.printed_exceptional))
    terms = [
        CoactionTerm(
            motivic=Side(kind="log_combination", combination=combination),
            derham=Side(kind="log_lefschetz", argument=argument),
            weight=(2, 2),
            provenance=f"massless-triangle {name}",
        )
        for name, argument in (("[f0f1|d1d2]", geometry.printed_d12), ("[f0f1|d1d3]", geometry.printed_d13))
    ]
    notes = [
        "a_1, a_2 are undetermined constants",
        "geometric cross-ratios: see massless_geometry for the comparison with the printed forms",
    ]
    return terms, notes


def triangle_coaction(g: FeynmanGraph, p: Optional[KinematicPoint] = None) -> Coaction:
    """
    Coaction of the triangle amplitude in four dimensions.

    Middle terms by number v of vanishing masses: 5 face periods (v = 0, the
    θ² period of the first face is the dependent one), 4 (v = 1), 2 face θ²
    periods plus an exceptional-divisor marker (v = 2), and the two
    logarithm tensors with undetermined constants (v = 3).

    Args:
        g: One-loop graph with three edges
        p: Optional point, checked for genericity and q_i² ≠ 0

    Raises:
        UnsupportedConfigurationError: For vanishing q_i² or non-generic points
    """
    _require_triangle(g)
    pair = symanzik(g)
    xi = pair.xi
    q_squared = _pair_coefficients(pair.phi)
    if any(value == 0 for value in q_squared.values()):
        raise UnsupportedConfigurationError(f"{g.name}: every q_i² must be non-trivial")
    if p is not None:
        report = validate_generic(g, p)
        if not report.passed:
            raise UnsupportedConfigurationError(f"{g.name}: non-generic point: {report.violations}")
        values = p.substitutions(g)
        if any(sp.sympify(value).xreplace(values) == 0 for value in q_squared.values()):
            raise UnsupportedConfigurationError(f"{g.name}: q_i² vanishes at the point")

    massless = [i for i, edge in enumerate(g.edges) if not edge.is_massive]
    v = len(massless)
    first, last = outer_terms(f"I_{g.name}", "triangle-coaction")
    middle: List[CoactionTerm] = []
    notes: List[str] = []
    markers: Tuple[sp.Symbol, ...] = ()

    if v == 0:
        middle.append(_face_term(g, xi, 0, "theta1")[1])
        for face in (1, 2):
            for variant in ("theta1", "theta2"):
                middle.append(_face_term(g, xi, face, variant)[1])
        notes.append(
            f"theta2 of face {g.edge_ids[0]} is dependent on the other five face periods"
        )
    elif v == 1:
        i0 = massless[0]
        for variant in ("theta1", "theta2"):
            middle.append(_face_term(g, xi, i0, variant)[1])
        for face in range(3):
            if face != i0:
                middle.append(_face_term(g, xi, face, "theta2", chart_edge=g.edge_ids[i0])[1])
    elif v == 2:
        for face in massless:
            other = next(i for i in massless if i != face)
            middle.append(_face_term(g, xi, face, "theta2", chart_edge=g.edge_ids[other])[1])
        massive = next(i for i in range(3) if i not in massless)
        markers = MARKERS[:1]
        middle.append(
            CoactionTerm(
                motivic=Side(
                    kind="marker",
                    coefficient=MARKERS[0],
                    label=f"log^m(exceptional divisor over the vertex of {g.edge_ids[massless[0]]})",
                ),
                derham=Side(kind="period", label=f"[mot_{g.name}, e^v, omega_{g.name}]^dr"),
                weight=(2, 2),
                provenance="triangle exceptional divisor",
            )
        )
        notes.append(f"face {g.edge_ids[massive]} carries no period: both quadric points are simplex vertices")
    else:
        terms, notes = _massless_terms(g)
        middle.extend(terms)
        markers = MARKERS

    logger.info(f"{g.name}: triangle coaction with {v} vanishing masses, {len(middle)} middle terms")
    return Coaction(graph_name=g.name, terms=[first, *middle, last], markers=markers, notes=notes)


class MasslessGeometry(BaseModel):
    """
    Points on the line L = V(α1 + α2 + α3) in the coordinate z = α1/α2:
    f0, f1 = Q ∩ L and d1 = 0, d2 = ∞, d3 = −1; the exceptional cross-ratios
    use the coordinate t = α_k/α_j on the divisor over the vertex α_i = 1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    q_squared: Tuple[sp.Expr, sp.Expr, sp.Expr]
    kallen: sp.Expr
    printed_radicand: sp.Expr
    f0: SqrtExpr
    f1: SqrtExpr
    d12: SqrtExpr
    d13: SqrtExpr
    printed_d12: SqrtExpr
    printed_d13: SqrtExpr
    exceptional: Tuple[SqrtExpr, SqrtExpr]
    printed_exceptional: Tuple[SqrtExpr, SqrtExpr]

    def compare(
        self, values: Mapping[sp.Symbol, sp.Rational], dps: int = config.common.DEFAULT_PRECISION, tolerance: float = 1e-20
    ) -> Dict[str, object]:
        """Evaluate geometric and printed forms; report agreement of each pair."""
        from numeval import eval_expr

        def value(expr: SqrtExpr) -> mp.mpc:
            return eval_expr(expr, values, dps).value

        report: Dict[str, object] = {}
        with mp.workdps(dps):
            for name, geometric, printed in (
                ("d12", self.d12, self.printed_d12),
                ("d13", self.d13, self.printed_d13),
            ):
                g_value, p_value = value(geometric), value(printed)
                report[f"{name}_geometric"] = complex(g_value)
                report[f"{name}_printed"] = complex(p_value)
                report[f"{name}_agrees"] = bool(abs(g_value - p_value) <= tolerance * max(1, abs(g_value)))
            for i, (geometric, printed) in enumerate(zip(self.exceptional, self.printed_exceptional), 1):
                g_value, p_value = value(geometric), value(printed)
                report[f"exceptional{i}_agrees"] = bool(abs(g_value - p_value) <= tolerance * abs(g_value))
                report[f"exceptional{i}_inverse"] = bool(abs(g_value * p_value - 1) <= tolerance)
            kallen, printed = value(SqrtExpr(self.kallen)), value(SqrtExpr(self.printed_radicand))
            report["radicands_agree"] = bool(abs(kallen - printed) <= tolerance * max(1, abs(kallen)))
        return report


def massless_geometry(g: FeynmanGraph) -> MasslessGeometry:
    """Intersection points and cross-ratios of the all-massless triangle."""
    _require_triangle(g)
    if any(edge.is_massive for edge in g.edges):
        raise UnsupportedConfigurationError(f"{g.name}: every internal mass must vanish")
    q = _pair_coefficients(symanzik(g).phi)
    q1, q2, q3 = q[0], q[1], q[2]

    B = sp.expand(q1 + q2 - q3)
    kallen = sp.expand(B**2 - 4 * q1 * q2)
    root = SqrtExpr(kallen).sqrt()
    f0 = (SqrtExpr(-B) - root) / SqrtExpr(2 * q2)
    f1 = (SqrtExpr(-B) + root) / SqrtExpr(2 * q2)
    d12 = cross_ratio(f0, f1, 0, sp.oo)
    d13 = cross_ratio(f0, f1, 0, -1)

    printed_radicand = sp.expand(q1**2 + q2**2 + q3**2 - 2 * q1 * q3 - 2 * q2 * q3)
    printed_root = SqrtExpr(printed_radicand).sqrt()
    printed_d12 = (SqrtExpr(B) + printed_root) ** 2 / SqrtExpr(4 * q1 * q2)
    C = sp.expand(q1 + q3 - q2)
    printed_d13 = printed_d12 * ((SqrtExpr(C) - printed_root) / (SqrtExpr(C) + printed_root))

    # divisor over the vertex α_i = 1, i = 1, 2; t = α_k/α_j with j < k the others
    coefficient = {frozenset((a, b)): q[3 - a - b] for a, b in itertools.combinations(range(3), 2)}
    exceptional = []
    printed_exceptional = []
    for i in (0, 1):
        j, k = (x for x in range(3) if x != i)
        u = SqrtExpr(-coefficient[frozenset((i, j))] / coefficient[frozenset((i, k))])
        exceptional.append(cross_ratio(-1, u, sp.oo, 0))
        printed_exceptional.append(SqrtExpr(q[j] / q[k]))

    geometry = MasslessGeometry(
        q_squared=(q1, q2, q3),
        kallen=kallen,
        printed_radicand=printed_radicand,
        f0=f0,
        f1=f1,
        d12=d12,
        d13=d13,
        printed_d12=printed_d12,
        printed_d13=printed_d13,
        exceptional=tuple(exceptional),
        printed_exceptional=tuple(printed_exceptional),
    )
    if sp.expand(kallen - printed_radicand) != 0:
        logger.info(f"{g.name}: printed radicand differs from the discriminant by {sp.expand(printed_radicand - kallen)}")
    return geometry


BETA = sp.symbols("beta1 beta2")


class PullbackReport(BaseModel):
    """Pullback of Ψ, Ξ and Ω to one chart, with the exceptional orders."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    chart: str
    exceptional: Optional[sp.Symbol]
    psi: sp.Expr
    xi: sp.Expr
    xi_quotient: sp.Expr
    jacobian: sp.Expr
    order_psi: int
    order_xi: int
    order_jacobian: int
    denominator_exponent: int

    @property
    def certified(self) -> bool:
        return self.denominator_exponent <= 0


def _order(expr: sp.Expr, variable: sp.Symbol) -> Tuple[int, sp.Expr]:
    """Largest power of `variable` dividing expr, certified by exact division."""
    expr = sp.expand(expr)
    if expr == 0:
        raise ChartError("the pulled-back polynomial vanishes identically")
    order = 0
    while True:
        quotient, remainder = sp.div(expr, variable, variable)
        if remainder != 0:
            return order, expr
        expr = sp.expand(quotient)
        order += 1


def admissible_charts(g: FeynmanGraph) -> List[str]:
    """The two blow-up charts at the vertex of every massless edge."""
    charts = []
    for i, edge in enumerate(g.edges):
        if edge.is_massive:
            continue
        j, k = (x + 1 for x in range(3) if x != i)
        charts.extend([f"{j}{k},1", f"{j}{k},2"])
    return charts


def blowup_pullback(g: FeynmanGraph, chart: str) -> PullbackReport:
    """
    Pull Ψ, Ξ and Ω back to a chart of the blow-up of P² at a vertex on the
    quadric.

    Charts "jk,1" (α_i = 1, α_j = β1β2, α_k = β2) and "jk,2" (α_i = 1,
    α_j = β1, α_k = β1β2) cover the exceptional divisor over the vertex
    α_j = α_k = 0; "i" is the plain affine chart α_i = 1. Positions are
    1-based.

    Raises:
        ChartError: For malformed charts or a vertex that is not on the quadric
    """
    _require_triangle(g)
    b1, b2 = BETA
    ig = build_integrand(g, 4)
    alphas = g.alphas()
    pair = symanzik(g)

    if "," in chart:
        pair_text, variant = chart.split(",")
        if len(pair_text) != 2 or variant not in ("1", "2") or not pair_text.isdigit():
            raise ChartError(f"malformed chart: {chart}")
        j, k = sorted(int(c) - 1 for c in pair_text)
        if j == k or not {j, k} <= {0, 1, 2}:
            raise ChartError(f"malformed chart: {chart}")
        i = 3 - j - k
        if g.edges[i].is_massive:
            raise ChartError(
                f"chart {chart} blows up the vertex of {g.edge_ids[i]}, which is not on the quadric"
            )
        if variant == "1":
            substitution = {alphas[i]: 1, alphas[j]: b1 * b2, alphas[k]: b2}
            jacobian, exceptional = b2, b2
        else:
            substitution = {alphas[i]: 1, alphas[j]: b1, alphas[k]: b1 * b2}
            jacobian, exceptional = b1, b1
    else:
        if not chart.isdigit() or int(chart) not in (1, 2, 3):
            raise ChartError(f"malformed chart: {chart}")
        i = int(chart) - 1
        j, k = (x for x in range(3) if x != i)
        substitution = {alphas[i]: 1, alphas[j]: b1, alphas[k]: b2}
        jacobian, exceptional = sp.Integer(1), None

    psi = sp.expand(pair.psi.as_expr().xreplace(substitution))
    xi = sp.expand(pair.xi.as_expr().xreplace(substitution))
    if exceptional is None:
        order_psi = order_xi = order_jacobian = 0
        quotient = xi
    else:
        order_psi, _ = _order(psi, exceptional)
        order_xi, quotient = _order(xi, exceptional)
        order_jacobian, _ = _order(jacobian, exceptional)
    # ω = Ψ^a / Ξ^b Ω with a possibly negative
    exponent = ig.xi_power * order_xi - ig.psi_power * order_psi - order_jacobian
    report = PullbackReport(
        chart=chart,
        exceptional=exceptional,
        psi=psi,
        xi=xi,
        xi_quotient=sp.expand(quotient),
        jacobian=jacobian,
        order_psi=order_psi,
        order_xi=order_xi,
        order_jacobian=order_jacobian,
        denominator_exponent=exponent,
    )
    if not report.certified:
        logger.error(f"{g.name}: pole of order {exponent} along the exceptional divisor in chart {chart}")
    return report


__all__ = [
    "MARKERS",
    "MasslessGeometry",
    "PullbackReport",
    "triangle_coaction",
    "massless_geometry",
    "admissible_charts",
    "blowup_pullback",
]
