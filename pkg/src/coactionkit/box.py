"""
Coaction of the four-dimensional box with generic masses and momenta.

Eight terms: I^m ⊗ (L^dr)², one term per pair of contracted edges j < k
pairing the θ¹ period of G/{e_j, e_k} with P_jk log^dr(f_jk) L^dr, and
1 ⊗ I^dr. U = C⁻¹ enters through abbreviation symbols U_j_k.
"""

import itertools
import logging
from typing import Dict, List, Literal, Optional, Tuple

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict

import config
from graphkin import FeynmanGraph, KinematicPoint, require_one_loop
from polyalg import det_and_inverse, quadratic_form_matrix
from symanzik import symanzik

from . import Coaction, CoactionError, CoactionTerm, Side, outer_terms
from .bubble import face_period
from .expr import SqrtExpr

# Configure module-specific logger
logger = logging.getLogger(__name__)

PROVENANCE = "box-coaction"


def u_symbol(j: int, k: int) -> sp.Symbol:
    """Entry (j, k) of U = C⁻¹, 1-based and symmetric."""
    j, k = min(j, k), max(j, k)
    return sp.Symbol(f"U_{j}_{k}")


def f_jk(j: int, k: int) -> SqrtExpr:
    """f_jk = (√(U_jk² − U_jj U_kk) − U_jk) / (√(U_jk² − U_jj U_kk) + U_jk)."""
    U_jk, U_jj, U_kk = u_symbol(j, k), u_symbol(j, j), u_symbol(k, k)
    root = SqrtExpr(U_jk**2 - U_jj * U_kk).sqrt()
    return (root - U_jk) / (root + U_jk)


class _BoxData(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    C: sp.Matrix
    det_C: sp.Expr
    definitions: Dict[sp.Symbol, sp.Expr]


def _box_data(g: FeynmanGraph, p: Optional[KinematicPoint]) -> _BoxData:
    require_one_loop(g)
    if g.edge_count != 4:
        raise CoactionError(f"{g.name} is not a box")
    quadric = quadratic_form_matrix(symanzik(g).xi)
    if p is not None:
        quadric = quadric.specialize(p.substitutions(g))
        det_C, U = det_and_inverse(quadric)
    else:
        det_C = sp.expand(quadric.entries.det(method="bareiss"))
        if det_C == 0:
            raise CoactionError(f"quadric matrix of {g.name} is singular")
        adjugate = quadric.entries.adjugate()
        U = adjugate.applyfunc(lambda entry: entry / det_C)
    definitions = {u_symbol(j + 1, k + 1): U[j, k] for j in range(4) for k in range(j, 4)}
    return _BoxData(C=quadric.entries, det_C=det_C, definitions=definitions)


def _face_determinant(C: sp.Matrix, j: int, k: int) -> sp.Expr:
    keep = [i for i in range(4) if i not in (j, k)]
    return sp.expand(C.extract(keep, keep).det())


def box_coaction(g: FeynmanGraph, p: Optional[KinematicPoint] = None) -> Coaction:
    """
    Build the eight-term coaction of a box, symbolically or at a point.

    Args:
        g: One-loop graph with four edges and generic masses
        p: Optional kinematic point; when given every kinematic quantity is
            an exact rational

    Raises:
        CoactionError: For non-box input or singular C
    """
    massless = [edge.id for edge in g.edges if not edge.is_massive]
    if massless:
        raise CoactionError(f"{g.name}: masses must be non-vanishing, {massless} are massless")
    data = _box_data(g, p)
    xi = symanzik(g).xi
    if p is not None:
        xi = xi.specialize(p.substitutions(g))
    abs_det_C = sp.Abs(data.det_C)

    first, last = outer_terms(f"I_{g.name}", PROVENANCE)
    terms: List[CoactionTerm] = [first]
    for j, k in itertools.combinations(range(4), 2):
        det_D = _face_determinant(data.C, j, k)
        if det_D == 0:
            raise CoactionError(f"face quadric of {{e{j + 1}, e{k + 1}}} is singular")
        keep = tuple(g.edge_ids[i] for i in range(4) if i not in (j, k))
        period = face_period(xi.restrict([j, k]), keep, "theta1")
        motivic_prefactor = SqrtExpr(1) / (2 * SqrtExpr(sp.Abs(det_D)).sqrt())
        P_jk = SqrtExpr(sp.Abs(det_D)).sqrt() / (8 * SqrtExpr(abs_det_C).sqrt())
        f = SqrtExpr(f_jk(j + 1, k + 1).expr, data.definitions)
        contracted = f"{g.edge_ids[j]},{g.edge_ids[k]}"
        terms.append(
            CoactionTerm(
                motivic=Side(
                    kind="log",
                    prefactor=motivic_prefactor,
                    argument=period.argument,
                    label=f"I_{g.name}/{{{contracted}}}(theta1)",
                ),
                derham=Side(kind="log_lefschetz", prefactor=P_jk, argument=f),
                weight=(2, 2),
                provenance=f"{PROVENANCE} face {{{contracted}}}",
            )
        )
    terms.append(last)
    logger.info(f"{g.name}: box coaction with {len(terms)} terms")
    return Coaction(
        graph_name=g.name,
        terms=terms,
        definitions=data.definitions,
        notes=["U_j_k abbreviates entry (j,k) of C^-1 as a cofactor ratio"],
    )


def prefactor_identity(g: FeynmanGraph, p: Optional[KinematicPoint] = None) -> List[sp.Expr]:
    """
    (motivic prefactor) · P_jk − 1/(16 √|det C|) for each middle term,
    simplified; every entry is zero when the prefactors agree.
    """
    data = _box_data(g, p)
    target = 1 / (16 * sp.sqrt(sp.Abs(data.det_C)))
    coaction = box_coaction(g, p)
    return [
        sp.simplify(term.motivic.prefactor.expr * term.derham.prefactor.expr - target)
        for term in coaction.middle_terms
    ]


class FaceCoefficientCheck(BaseModel):
    """
    Exact a_jk against κ · (√|det D_jk| / (4√|det C|)) ∂ log f_jk.

    ∂ log f_jk is imaginary where U_jk² − U_jj U_kk < 0 and real otherwise;
    κ is +BOX_NORMALIZATION on the imaginary sheet and −BOX_NORMALIZATION on
    the real one.
    """

    pair: Tuple[int, int]
    exact: float
    formula: float
    sheet: Literal["imaginary", "real"]
    expected: float
    residual: float
    passed: bool


def _to_mp_matrix(M: sp.Matrix) -> mp.matrix:
    return mp.matrix([[mp.mpf(sp.Rational(x).p) / sp.Rational(x).q for x in M.row(i)] for i in range(M.rows)])


def a_jk_consistency(
    g: FeynmanGraph,
    p: KinematicPoint,
    param: Optional[sp.Symbol] = None,
    step: float = config.common.DERIVATIVE_STEP,
    dps: int = config.common.DERIVATIVE_PRECISION,
    tolerance: float = config.common.DERIVATIVE_TOLERANCE,
) -> List[FaceCoefficientCheck]:
    """
    Compare the face coefficients of the box primitive with the logarithmic
    derivative of f_jk, taken by central differences of U = C⁻¹ along ∂C/∂param.
    """
    from griffiths import box_face_coefficients

    coefficients = box_face_coefficients(g, p, param)
    quadric = quadratic_form_matrix(symanzik(g).xi).entries
    dC_exact = quadric.diff(coefficients.param).xreplace(p.substitutions(g))
    data = _box_data(g, p)
    normalization = config.common.BOX_NORMALIZATION

    checks = []
    with mp.workdps(dps):
        C = _to_mp_matrix(data.C)
        dC = _to_mp_matrix(dC_exact)
        h = mp.mpf(step)
        U_plus = (C + h * dC) ** -1
        U_minus = (C - h * dC) ** -1
        abs_det_C = abs(mp.det(C))
        for (j, k), value in coefficients.a.items():
            U_jk, U_jj, U_kk = u_symbol(j, k), u_symbol(j, j), u_symbol(k, k)
            f = sp.lambdify((U_jk, U_jj, U_kk), f_jk(j, k).expr, "mpmath")
            a, b = j - 1, k - 1
            f_plus = f(U_plus[a, b], U_plus[a, a], U_plus[b, b])
            f_minus = f(U_minus[a, b], U_minus[a, a], U_minus[b, b])
            derivative = mp.log(f_plus / f_minus) / (2 * h)

            det_D = sp.Rational(_face_determinant(data.C, a, b))
            factor = mp.sqrt(abs(mp.mpf(det_D.p) / det_D.q)) / (4 * mp.sqrt(abs_det_C))
            radicand = data.definitions[U_jk] ** 2 - data.definitions[U_jj] * data.definitions[U_kk]
            if radicand < 0:
                sheet, formula, sign = "imaginary", factor * derivative.imag, 1
            else:
                sheet, formula, sign = "real", factor * derivative.real, -1
            expected = sign * normalization * formula

            exact_value = mp.mpf(value.p) / value.q
            residual = abs(exact_value - expected)
            scale = max(abs(exact_value), abs(expected))
            passed = residual <= tolerance * scale
            if not passed:
                logger.warning(
                    f"{g.name}: face coefficient a_{j}{k} = {mp.nstr(exact_value, 12)}, "
                    f"derivative gives {mp.nstr(expected, 12)}"
                )
            checks.append(
                FaceCoefficientCheck(
                    pair=(j, k),
                    exact=float(exact_value),
                    formula=float(formula),
                    sheet=sheet,
                    expected=float(expected),
                    residual=float(residual),
                    passed=passed,
                )
            )
    return checks


__all__ = [
    "u_symbol",
    "f_jk",
    "box_coaction",
    "prefactor_identity",
    "FaceCoefficientCheck",
    "a_jk_consistency",
]
