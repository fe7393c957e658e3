"""
Reduction of one-loop integrands in four dimensions to box integrals.

Writing the numerator P of P/Ξ^k Ω as ∑ A_j ∂Ξ/∂α_j, Stokes' theorem on the
simplex gives

    (k − 1) J_n[P, k] = J_n[div A, k − 1] + ∑_j J_{n−1}^{(j)}[A_j|α_j=0, k − 1]

where J^{(j)} lives on the face α_j = 0 with quadric Ξ|α_j=0. Iterating until
every term is a constant over Ξ² on four variables leaves a combination of
box integrals of the quotients G/e_I.
"""

import itertools
import logging
from typing import Dict, FrozenSet, List, Literal, Optional, Tuple

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field

import config
from graphkin import FeynmanGraph, KinematicPoint, require_one_loop
from polyalg import KPoly, PolyError
from symanzik import build_integrand, symanzik

from . import ReductionError, divergence, jacobian_decompose, picard_fuchs_B

# Configure module-specific logger
logger = logging.getLogger(__name__)


class Remainder(BaseModel):
    """A term that stops above four variables, e.g. the six-dimensional hexagon."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    contracted: FrozenSet[str]
    coefficient: sp.Rational
    xi_power: int
    variables: int


class ReductionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph_name: str
    coefficients: Dict[FrozenSet[str], sp.Rational]
    remainder: List[Remainder] = Field(default_factory=list)
    graph_value: Optional[float] = None
    reduced_value: Optional[float] = None
    residual: Optional[float] = None
    relative_residual: Optional[float] = None

    def sorted_items(self) -> List[Tuple[Tuple[str, ...], sp.Rational]]:
        return sorted((tuple(sorted(key)), value) for key, value in self.coefficients.items())


class _Face(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    contracted: FrozenSet[str]
    edge_ids: Tuple[str, ...]
    xi: KPoly


def _face(face: _Face, position: int) -> _Face:
    return _Face(
        contracted=face.contracted | {face.edge_ids[position]},
        edge_ids=face.edge_ids[:position] + face.edge_ids[position + 1 :],
        xi=face.xi.restrict([position]),
    )


def _reduce(
    numerator: KPoly,
    k: int,
    face: _Face,
    weight: sp.Rational,
    coefficients: Dict[FrozenSet[str], sp.Rational],
    remainder: Dict[Tuple[FrozenSet[str], int], sp.Rational],
) -> None:
    if numerator.is_zero():
        return
    n = len(face.edge_ids)
    degree = numerator.total_degree()
    if degree != 2 * k - n:
        raise ReductionError(f"numerator degree {degree} does not match pole order {k} on {n} variables")

    if degree == 0:
        constant = sp.Rational(numerator.as_expr())
        if n == 4:
            coefficients[face.contracted] += weight * constant
        else:
            key = (face.contracted, k)
            remainder[key] = remainder.get(key, sp.Integer(0)) + weight * constant
        return

    try:
        A = jacobian_decompose(numerator, face.xi)
    except PolyError as e:
        raise ReductionError(f"degenerate quadric on face {sorted(face.contracted)}: {e}") from e

    step = weight / (k - 1)
    _reduce(divergence(A), k - 1, face, step, coefficients, remainder)
    for position, a_j in enumerate(A):
        _reduce(a_j.restrict([position]), k - 1, _face(face, position), step, coefficients, remainder)


def _quadrature_method(dim: int, method: str) -> str:
    if method != "auto":
        return method
    return "adaptive" if dim <= 3 else "mc"


def reduce_to_boxes(
    g: FeynmanGraph,
    p: KinematicPoint,
    check: bool = True,
    method: Literal["auto", "adaptive", "mc"] = "auto",
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    epsrel: Optional[float] = None,
) -> ReductionResult:
    """
    Express the four-dimensional integral of g as ∑ a_I I_{G/e_I} over |I| = N − 4.

    Args:
        g: One-loop graph with 4 ≤ N ≤ MAX_ONE_LOOP_EDGES
        p: Generic rational kinematic point
        check: Measure the residual by quadrature
        method: Quadrature method; "auto" uses adaptive up to three dimensions
        budget: Quadrature budget
        seed: Monte Carlo seed
        epsrel: Relative tolerance of adaptive quadrature

    Raises:
        ReductionError: On a singular face quadric or an unsupported size
    """
    from numeval import simplex_quadrature

    require_one_loop(g)
    n = g.edge_count
    if n < 4:
        raise ReductionError(f"{g.name} has {n} edges, at least 4 are needed")
    if n > config.common.MAX_ONE_LOOP_EDGES:
        raise ReductionError(f"{g.name} has {n} edges, the limit is {config.common.MAX_ONE_LOOP_EDGES}")

    subs = p.substitutions(g)
    pair = symanzik(g)
    top = _Face(contracted=frozenset(), edge_ids=g.edge_ids, xi=pair.xi.specialize(subs))
    numerator = KPoly(sp.expand(pair.psi.as_expr() ** (n - 4)), pair.psi.alphas)

    coefficients = {frozenset(I): sp.Integer(0) for I in itertools.combinations(g.edge_ids, n - 4)}
    remainder: Dict[Tuple[FrozenSet[str], int], sp.Rational] = {}
    _reduce(numerator, n - 2, top, sp.Integer(1), coefficients, remainder)
    result = ReductionResult(
        graph_name=g.name,
        coefficients=coefficients,
        remainder=[
            Remainder(contracted=I, coefficient=c, xi_power=k, variables=n - len(I))
            for (I, k), c in sorted(remainder.items(), key=lambda item: sorted(item[0][0]))
            if c != 0
        ],
    )
    logger.info(f"{g.name}: {len(coefficients)} box coefficients, {len(result.remainder)} remainder terms")
    if not check:
        return result

    ig = build_integrand(g, 4)
    one = KPoly(1, top.xi.alphas)
    graph_value = simplex_quadrature(
        one, top.xi, ig.xi_power, ig.psi_power,
        method=_quadrature_method(n - 1, method), budget=budget, seed=seed, epsrel=epsrel,
    ).value

    reduced = 0.0
    for I, a_I in coefficients.items():
        if a_I == 0:
            continue
        xi_face = top.xi.restrict(g.edge_index(e) for e in I)
        value = simplex_quadrature(
            KPoly(1, xi_face.alphas), xi_face, 2,
            method=_quadrature_method(3, method), budget=budget, seed=seed, epsrel=epsrel,
        ).value
        reduced += float(a_I) * value
    for term in result.remainder:
        xi_face = top.xi.restrict(g.edge_index(e) for e in term.contracted)
        value = simplex_quadrature(
            KPoly(1, xi_face.alphas), xi_face, term.xi_power,
            method=_quadrature_method(term.variables - 1, method), budget=budget, seed=seed, epsrel=epsrel,
        ).value
        reduced += float(term.coefficient) * value

    result.graph_value = graph_value
    result.reduced_value = reduced
    result.residual = abs(graph_value - reduced)
    result.relative_residual = result.residual / abs(graph_value)
    if result.relative_residual > config.common.REDUCTION_TOLERANCE:
        logger.warning(f"{g.name}: reduction residual {result.relative_residual:.3g}")
    return result


class BoxFaceCoefficients(BaseModel):
    """∂_param I = B·I + (1/2) ∑_{j<k} a_jk · (bubble period of G/{e_j, e_k})."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    param: sp.Symbol
    B: sp.Rational
    a: Dict[Tuple[int, int], sp.Rational]


def box_face_coefficients(
    g: FeynmanGraph, p: KinematicPoint, param: Optional[sp.Symbol] = None
) -> BoxFaceCoefficients:
    """
    Exact face coefficients a_jk of the box primitive: each A_j restricted to
    α_j = 0 is decomposed once more over the face quadric, leaving constants.
    """
    data = picard_fuchs_B(g, param, p)
    xi = symanzik(g).xi.specialize(p.substitutions(g))
    face_constants: Dict[int, Dict[int, sp.Rational]] = {}
    for j, a_j in enumerate(data.A):
        restricted = a_j.restrict([j])
        face_xi = xi.restrict([j])
        try:
            A_face = jacobian_decompose(restricted, face_xi) if not restricted.is_zero() else ()
        except PolyError as e:
            raise ReductionError(f"degenerate triangle face {j + 1}: {e}") from e
        others = [k for k in range(4) if k != j]
        face_constants[j] = {
            k: sp.Rational(A_face[position].as_expr()) if A_face else sp.Integer(0)
            for position, k in enumerate(others)
        }
    a = {}
    for j, k in itertools.combinations(range(4), 2):
        a[(j + 1, k + 1)] = face_constants[j][k] + face_constants[k][j]
    if all(value == 0 for value in a.values()) and data.B == 0:
        logger.debug(f"{g.name}: parameter {data.param} does not enter Ξ")
    return BoxFaceCoefficients(param=data.param, B=data.B, a=a)


__all__ = ["Remainder", "ReductionResult", "BoxFaceCoefficients", "reduce_to_boxes", "box_face_coefficients"]
