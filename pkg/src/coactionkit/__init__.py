"""
Closed-form coaction expressions for one-loop graphs.

Terms are tensors of a motivic side and a de Rham side. Logarithm arguments
and prefactors are SqrtExpr trees over the kinematic symbols; amplitudes,
Lefschetz factors and undetermined constants are tagged markers.
"""

import logging
from typing import Dict, List, Literal, Optional, Tuple, Union

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field

from .expr import SqrtExpr, as_sqrt_expr

# Configure module-specific logger
logger = logging.getLogger(__name__)


class CoactionError(Exception):
    """Base exception for coaction construction"""

    pass


class DegenerateQuadricError(CoactionError):
    """Raised when a face quadric has a double root"""

    pass


class CoincidentPointsError(CoactionError):
    """Raised when a cross-ratio is formed from coincident points"""

    pass


class UnsupportedConfigurationError(CoactionError):
    """Raised for mass and momentum patterns without a closed-form coaction"""

    pass


class ChartError(CoactionError):
    """Raised when a blow-up chart does not touch the blown-up point"""

    pass


SideKind = Literal[
    "amplitude", "unit", "log", "li1", "li2", "marker", "log_combination", "lefschetz",
    "lefschetz_squared", "log_lefschetz", "period",
]


class Side(BaseModel):
    """
    One side of a tensor term: `coefficient · prefactor · kind(argument)`.

    `coefficient` holds undetermined markers (a_1, a_2) or exact rationals;
    `label` names classes without a closed form.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: SideKind
    prefactor: SqrtExpr = Field(default_factory=lambda: SqrtExpr(1))
    argument: Optional[SqrtExpr] = None
    coefficient: sp.Expr = sp.Integer(1)
    label: Optional[str] = None
    combination: Tuple[Tuple[sp.Expr, SqrtExpr], ...] = ()

    def render(self) -> str:
        if self.kind == "log_combination":
            return " + ".join(f"{sp.sstr(c)}*log({arg.to_text()})" for c, arg in self.combination)
        body = {
            "marker": self.label or "M",
            "amplitude": self.label or "I",
            "unit": "1",
            "lefschetz": "L",
            "lefschetz_squared": "L^2",
            "period": self.label or "P",
        }.get(self.kind)
        if body is None:
            name = {"log_lefschetz": "log", "li1": "Li1", "li2": "Li2"}.get(self.kind, self.kind)
            body = f"{name}({self.argument.to_text()})"
            if self.kind == "log_lefschetz":
                body += " L"
        factors = []
        if self.coefficient != 1:
            factors.append(f"({sp.sstr(self.coefficient)})")
        if self.prefactor != 1:
            factors.append(f"({self.prefactor.to_text()})")
        return "*".join(factors + [body])


class CoactionTerm(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    motivic: Side
    derham: Side
    weight: Tuple[int, int]
    provenance: str
    flags: Tuple[str, ...] = ()

    def render(self) -> str:
        return f"{self.motivic.render()} (x) {self.derham.render()}"


class Coaction(BaseModel):
    """Coaction of one amplitude, with the source of each term and any markers."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph_name: str
    terms: List[CoactionTerm]
    markers: Tuple[sp.Symbol, ...] = ()
    notes: List[str] = Field(default_factory=list)
    definitions: Dict[sp.Symbol, sp.Expr] = Field(default_factory=dict)

    @property
    def middle_terms(self) -> List[CoactionTerm]:
        return [term for term in self.terms if term.motivic.kind not in ("amplitude", "unit")]

    def render(self) -> str:
        lines = [f"Coaction of {self.graph_name}: {len(self.terms)} terms"]
        for i, term in enumerate(self.terms, 1):
            lines.append(f"  [{i}] {term.render()}    # {term.provenance}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


def outer_terms(amplitude_label: str, provenance: str) -> Tuple[CoactionTerm, CoactionTerm]:
    """I^m ⊗ (L^dr)² and 1 ⊗ I^dr, shared by every top-weight coaction."""
    first = CoactionTerm(
        motivic=Side(kind="amplitude", label=f"{amplitude_label}^m"),
        derham=Side(kind="lefschetz_squared"),
        weight=(4, 0),
        provenance=provenance,
    )
    last = CoactionTerm(
        motivic=Side(kind="unit"),
        derham=Side(kind="amplitude", label=f"{amplitude_label}^dr"),
        weight=(0, 4),
        provenance=provenance,
    )
    return first, last


Point = Union[SqrtExpr, sp.Expr, int]


def cross_ratio(p0: Point, p1: Point, p2: Point, p3: Point) -> SqrtExpr:
    """
    [p0 p1 | p2 p3] = (p2 − p0)(p3 − p1) / ((p2 − p1)(p3 − p0)).

    Pass sympy.oo for the point at infinity; the two factors containing it
    cancel.

    Raises:
        CoincidentPointsError: If a denominator factor vanishes identically
    """
    points = [p if p is sp.oo else as_sqrt_expr(p) for p in (p0, p1, p2, p3)]
    if sum(p is sp.oo for p in points) > 1:
        raise CoincidentPointsError("at most one point may be at infinity")

    def difference(a, b):
        if a is sp.oo or b is sp.oo:
            return None
        return a - b

    pairs = {
        "num": [(points[2], points[0]), (points[3], points[1])],
        "den": [(points[2], points[1]), (points[3], points[0])],
    }
    factors = {}
    for side, items in pairs.items():
        value = SqrtExpr(1)
        for a, b in items:
            d = difference(a, b)
            if d is not None:
                value = value * d
        factors[side] = value

    numerator, denominator = factors["num"], factors["den"]
    if denominator.is_syntactic_zero():
        raise CoincidentPointsError("cross-ratio of coincident points")
    if numerator.is_syntactic_zero():
        return SqrtExpr(0)
    return SqrtExpr(sp.cancel(numerator.expr / denominator.expr), {**numerator.definitions, **denominator.definitions})


from .bubble import BubblePeriod, bubble_period, face_period  # noqa: E402
from .box import FaceCoefficientCheck, a_jk_consistency, box_coaction, f_jk, prefactor_identity  # noqa: E402
from .triangle import (  # noqa: E402
    MasslessGeometry,
    PullbackReport,
    admissible_charts,
    blowup_pullback,
    massless_geometry,
    triangle_coaction,
)
from .dilog import dilog_coaction, im_dilog_coaction, weight_collapse_residual, weight_graded_dims  # noqa: E402

__all__ = [
    "CoactionError",
    "DegenerateQuadricError",
    "CoincidentPointsError",
    "UnsupportedConfigurationError",
    "ChartError",
    "SqrtExpr",
    "Side",
    "CoactionTerm",
    "Coaction",
    "BubblePeriod",
    "MasslessGeometry",
    "PullbackReport",
    "cross_ratio",
    "outer_terms",
    "bubble_period",
    "face_period",
    "FaceCoefficientCheck",
    "a_jk_consistency",
    "box_coaction",
    "f_jk",
    "prefactor_identity",
    "triangle_coaction",
    "massless_geometry",
    "admissible_charts",
    "blowup_pullback",
    "dilog_coaction",
    "im_dilog_coaction",
    "weight_collapse_residual",
    "weight_graded_dims",
]
