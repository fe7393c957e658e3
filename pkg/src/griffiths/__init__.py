"""
Griffiths pole reduction for one-loop quadrics.

The partial derivatives of a quadric Ξ = α C αᵀ are the linear forms 2(Cα)_i,
so membership in the Jacobian ideal is a rational linear system. Everything in
this package runs at pinned rational kinematic points.
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict, Field

from graphkin import FeynmanGraph, KinematicPoint, require_one_loop, s_symbol
from polyalg import (
    KPoly,
    linear_solve,
    partial_derivative,
    quadratic_form_matrix,
    det_and_inverse,
)
from symanzik import symanzik

from . import forms

# Configure module-specific logger
logger = logging.getLogger(__name__)


class GriffithsError(Exception):
    """Base exception for Griffiths reduction"""

    pass


class NotInJacobianIdealError(GriffithsError):
    """Raised when a numerator cannot be written as ∑ A_i ∂Ξ/∂α_i"""

    pass


class ReductionError(GriffithsError):
    """Raised when a reduction step meets a degenerate face"""

    pass


def _monomials(n: int, degree: int) -> List[Tuple[int, ...]]:
    result = []
    for combo in itertools.combinations_with_replacement(range(n), degree):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        result.append(tuple(exps))
    return sorted(result, reverse=True)


def jacobian_decompose(
    numerator: KPoly,
    xi: KPoly,
    subs: Optional[Mapping[sp.Symbol, sp.Rational]] = None,
    column_order: Optional[Sequence[int]] = None,
) -> Tuple[KPoly, ...]:
    """
    Write a homogeneous numerator as ∑ A_i ∂Ξ/∂α_i.

    Args:
        numerator: Homogeneous polynomial of degree k ≥ 1 (or zero)
        xi: The quadric Ξ
        subs: Kinematic values pinning both polynomials to QQ
        column_order: Pivot search order for the underlying linear solve

    Returns:
        A_1…A_N, homogeneous of degree k − 1; the minimal-support solution for
        the pivoting order

    Raises:
        SingularMatrixError: If the quadric matrix is singular at the point
        NotInJacobianIdealError: For non-zero constants or inconsistent systems
    """
    if subs:
        numerator = numerator.specialize(subs)
        xi = xi.specialize(subs)
    if numerator.alphas != xi.alphas:
        raise GriffithsError("numerator and quadric use different α-variables")
    alphas = xi.alphas
    n = len(alphas)
    zero = KPoly(0, alphas)
    if numerator.is_zero():
        return tuple(zero for _ in range(n))
    if not numerator.is_homogeneous():
        raise GriffithsError(f"numerator is not homogeneous: {numerator.to_text()}")
    degree = numerator.total_degree()
    if degree == 0:
        raise NotInJacobianIdealError("a non-zero constant is not in the Jacobian ideal")

    det_and_inverse(quadratic_form_matrix(xi))
    partials = [partial_derivative(xi, i) for i in range(n)]
    sources = _monomials(n, degree - 1)
    targets = _monomials(n, degree)
    row_of = {exps: r for r, exps in enumerate(targets)}

    M = sp.zeros(len(targets), n * len(sources))
    for i, partial in enumerate(partials):
        for s, exps in enumerate(sources):
            shifted = KPoly.from_terms({exps: 1}, alphas) * partial
            for term, coeff in shifted.terms().items():
                M[row_of[term], i * len(sources) + s] = coeff
    rhs = sp.zeros(len(targets), 1)
    for term, coeff in numerator.terms().items():
        rhs[row_of[term], 0] = coeff

    solution = linear_solve(M, rhs, column_order=column_order)
    if not solution.consistent:
        raise NotInJacobianIdealError("numerator is not in the Jacobian ideal at this point")

    A = tuple(
        KPoly.from_terms(
            {exps: solution.particular[i * len(sources) + s, 0] for s, exps in enumerate(sources)},
            alphas,
        )
        for i in range(n)
    )
    check = zero
    for a_i, partial in zip(A, partials):
        check = check + a_i * partial
    if check != numerator:
        raise GriffithsError("Jacobian decomposition failed re-substitution")
    logger.debug(f"Decomposed degree-{degree} numerator over {n} partials")
    return A


def divergence(A: Sequence[KPoly]) -> KPoly:
    """∑ ∂A_i/∂α_i."""
    alphas = A[0].alphas
    total = KPoly(0, alphas)
    for i, a_i in enumerate(A):
        total = total + partial_derivative(a_i, i)
    return total


def beta_numerators(A: Sequence[KPoly]) -> Dict[Tuple[int, int], KPoly]:
    """
    Numerator table of β = ι_A Ω / Ξ², keyed by the 1-based pair (x, y) of
    omitted differentials; entry (−1)^{x+y}(α_y A_x − α_x A_y).
    """
    alphas = A[0].alphas
    eta = forms.interior([a.as_expr() for a in A], forms.omega_form(alphas))
    table = forms.removed_pairs(eta, len(alphas))
    return {
        (x + 1, y + 1): KPoly(table.get((x, y), 0), alphas)
        for x, y in itertools.combinations(range(len(alphas)), 2)
    }


def exterior_identity_holds(A: Sequence[KPoly], xi: KPoly, power: int = 2) -> bool:
    """
    Exact check of d(ι_AΩ/Ξ^k) = (−k ∑A_i∂Ξ/∂α_i / Ξ^{k+1} + div A / Ξ^k) Ω,
    multiplied through by Ξ^{k+1}.
    """
    alphas = xi.alphas
    xi_expr = xi.as_expr()
    eta = forms.interior([a.as_expr() for a in A], forms.omega_form(alphas))
    lhs = forms.add(
        forms.scale(forms.exterior_derivative(eta, alphas), xi_expr),
        forms.scale(forms.wedge_one_form(forms.gradient(xi_expr, alphas), eta), -power),
    )
    contracted = sum(
        (a.as_expr() * sp.diff(xi_expr, alpha) for a, alpha in zip(A, alphas)), sp.Integer(0)
    )
    factor = -power * contracted + xi_expr * divergence(A).as_expr()
    rhs = forms.scale(forms.omega_form(alphas), factor)
    return forms.forms_equal(lhs, rhs)


class PicardFuchsData(BaseModel):
    """A, B and β of the relation between ∂_param ω and ω modulo exact forms."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    param: sp.Symbol
    numerator: KPoly = Field(..., description="−2 ∂Ξ/∂param at the pinned point")
    A: Tuple[KPoly, ...]
    B: sp.Rational = Field(..., description="(1/2) ∑ ∂A_i/∂α_i")
    beta: Dict[Tuple[int, int], KPoly]
    identity_exact: bool = Field(..., description="Exterior-derivative identity holds exactly")


def picard_fuchs_B(
    g: FeynmanGraph,
    param: Optional[sp.Symbol],
    p: KinematicPoint,
    column_order: Optional[Sequence[int]] = None,
) -> PicardFuchsData:
    """
    Picard-Fuchs data of the box integrand Ω/Ξ² with respect to one kinematic symbol.

    Differentiating gives ∂_param ω = −2 ∂_paramΞ / Ξ³ Ω; writing the numerator
    −2 ∂_paramΞ = ∑ A_i ∂Ξ/∂α_i yields B = (1/2) div A and the primitive β.
    """
    require_one_loop(g)
    if g.edge_count != 4:
        raise GriffithsError(f"{g.name} is not a box")
    param = param if param is not None else s_symbol(1, 1)
    subs = p.substitutions(g)
    xi = symanzik(g).xi
    numerator = KPoly(sp.expand(-2 * sp.diff(xi.as_expr(), param)), xi.alphas).specialize(subs)
    xi_point = xi.specialize(subs)
    A = jacobian_decompose(numerator, xi_point, column_order=column_order)
    B = sp.Rational(divergence(A).as_expr()) / 2
    identity = exterior_identity_holds(A, xi_point, power=2)
    if not identity:
        logger.error(f"Exterior-derivative identity failed for {g.name} at {param}")
    return PicardFuchsData(
        param=param,
        numerator=numerator,
        A=A,
        B=sp.Rational(B),
        beta=beta_numerators(A),
        identity_exact=identity,
    )


def _inv_sqrt_abs_det(g: FeynmanGraph, p: KinematicPoint, dps: int) -> mp.mpf:
    C = quadratic_form_matrix(symanzik(g).xi)
    det, _ = det_and_inverse(C, p.substitutions(g))
    with mp.workdps(dps):
        return 1 / mp.sqrt(abs(mp.mpf(det.p) / det.q))


def _param_key(param: sp.Symbol) -> Tuple[int, int]:
    name = param.name
    if not (name.startswith("s[") and name.endswith("]")):
        raise GriffithsError(f"finite differences are only defined for s-invariants, not {name}")
    i, j = name[2:-1].split(",")
    return int(i), int(j)


class HomogeneousCheck(BaseModel):
    """Residuals of the homogeneous relation for h = 1/√|det C|."""

    param: str
    B: float
    derivative: float
    residual_plus: float = Field(..., description="|∂h + B h|")
    residual_minus: float = Field(..., description="|∂h − B h|")
    literal_residual: float = Field(..., description="|∂(1/(16√|det C|)) − B|")
    resolved_sign: Optional[str] = None


def homogeneous_check(
    g: FeynmanGraph,
    param: Optional[sp.Symbol],
    p: KinematicPoint,
    step: Fraction = Fraction(1, 10**6),
    tolerance: float = 1e-9,
    dps: int = 30,
) -> HomogeneousCheck:
    """
    Central finite differences of h = 1/√|det C| on rational perturbations of
    the parameter, compared with B·h in both sign conventions.
    """
    param = param if param is not None else s_symbol(1, 1)
    data = picard_fuchs_B(g, param, p)
    key = _param_key(param)
    with mp.workdps(dps):
        h = _inv_sqrt_abs_det(g, p, dps)
        h_plus = _inv_sqrt_abs_det(g, p.perturbed({key: step}), dps)
        h_minus = _inv_sqrt_abs_det(g, p.perturbed({key: -step}), dps)
        derivative = (h_plus - h_minus) / (2 * mp.mpf(step.numerator) / step.denominator)
        B = mp.mpf(data.B.p) / data.B.q
        scale = max(abs(derivative), abs(B * h), mp.mpf(1e-30))
        plus = abs(derivative + B * h) / scale
        minus = abs(derivative - B * h) / scale
        literal = abs(derivative / 16 - B)
    resolved = None
    if minus <= tolerance:
        resolved = "dh - B h = 0"
    elif plus <= tolerance:
        resolved = "dh + B h = 0"
    if resolved is None:
        logger.warning(f"Homogeneous relation not satisfied in either sign for {param}")
    return HomogeneousCheck(
        param=param.name,
        B=float(B),
        derivative=float(derivative),
        residual_plus=float(plus),
        residual_minus=float(minus),
        literal_residual=float(literal),
        resolved_sign=resolved,
    )


from .reduction import (  # noqa: E402
    ReductionResult,
    box_face_coefficients,
    reduce_to_boxes,
)

__all__ = [
    "GriffithsError",
    "NotInJacobianIdealError",
    "ReductionError",
    "PicardFuchsData",
    "HomogeneousCheck",
    "ReductionResult",
    "jacobian_decompose",
    "divergence",
    "beta_numerators",
    "exterior_identity_holds",
    "picard_fuchs_B",
    "homogeneous_check",
    "reduce_to_boxes",
    "box_face_coefficients",
]
