"""
Log families of one-loop coactions and the points they are sampled at.

Box families are written over abbreviation symbols C_i_j, U_i_j (entries of
the quadric matrix and its inverse) and detU = 1/det C, which
`box_abbreviations` assigns exactly at each point.
"""

import itertools
import logging
from collections import Counter
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict

import config
from coactionkit import SqrtExpr, box_coaction, face_period, im_dilog_coaction
from coactionkit.box import u_symbol
from graphkin import FeynmanGraph, GraphError, KinematicPoint, triangle_graph, validate_generic
from polyalg import PolyError, det_and_inverse, quadratic_form_matrix
from symanzik import symanzik

from . import Abbreviations, LogFamily, RelationError, RelationSet, log_basis
from .retry import retry_with_precision

# Configure module-specific logger
logger = logging.getLogger(__name__)

# Points drawn before the majority sign pattern of the radicands is fixed
PATTERN_BATCH = 20

DET_U = sp.Symbol("detU")


def c_symbol(i: int, j: int) -> sp.Symbol:
    """Entry (i, j) of the quadric matrix C, 1-based and symmetric."""
    i, j = min(i, j), max(i, j)
    return sp.Symbol(f"C_{i}_{j}")


class FamilyTerm(BaseModel):
    """coefficient · log^m(motivic) ⊗ log^dr(derham)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    motivic: SqrtExpr
    derham: SqrtExpr
    coefficient: sp.Expr
    label: str


def _draw(g: FeynmanGraph, rng: np.random.Generator) -> Optional[KinematicPoint]:
    legs = len(g.legs)
    dimension = max(legs, 2)
    vectors = rng.integers(-6, 7, size=(legs - 1, dimension))
    momenta = list(vectors) + [-vectors.sum(axis=0)]
    s = {
        (i + 1, j + 1): Fraction(int(np.dot(momenta[i], momenta[j])))
        for i, j in itertools.combinations_with_replacement(range(legs), 2)
    }
    by_mass = {
        edge.mass: Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 7)))
        for edge in g.massive_edges
    }
    point = KinematicPoint(s=s, msq={edge.id: by_mass[edge.mass] for edge in g.massive_edges})
    report = validate_generic(g, point)
    if not (report.passed and report.euclidean):
        return None
    return point


def _values(
    g: FeynmanGraph, p: KinematicPoint, abbreviations: Optional[Abbreviations]
) -> Dict[sp.Symbol, sp.Rational]:
    values = p.substitutions(g)
    if abbreviations is not None:
        values.update(abbreviations(g, p))
    return values


def _sign_pattern(
    g: FeynmanGraph,
    p: KinematicPoint,
    radicands: Sequence[sp.Expr],
    abbreviations: Optional[Abbreviations],
) -> Optional[Tuple[int, ...]]:
    try:
        values = _values(g, p, abbreviations)
    except (PolyError, GraphError):
        return None
    pattern = []
    for radicand in radicands:
        value = radicand.xreplace(values)
        if value.free_symbols:
            raise RelationError(f"radicand {radicand} has unassigned symbols")
        sign = sp.sign(sp.N(value))
        if sign == 0:
            return None
        pattern.append(int(sign))
    return tuple(pattern)


def generic_points(
    g: FeynmanGraph,
    count: int,
    seed: int = config.common.DEFAULT_SEED,
    radicands: Sequence[sp.Expr] = (),
    abbreviations: Optional[Abbreviations] = None,
    max_draws: Optional[int] = None,
) -> List[KinematicPoint]:
    """
    Random generic Euclidean points from integer momenta in dimension
    #legs and rational squared masses.

    Only points where every radicand has the majority sign pattern are kept,
    so square roots stay on one sheet across the sample.

    Raises:
        RelationError: When max_draws draws do not give `count` points
    """
    rng = np.random.default_rng(seed)
    max_draws = max_draws or 200 * count + 200
    pool: List[Tuple[KinematicPoint, Tuple[int, ...]]] = []
    target: Optional[Tuple[int, ...]] = None
    for _ in range(max_draws):
        point = _draw(g, rng)
        if point is None:
            continue
        pattern = _sign_pattern(g, point, radicands, abbreviations)
        if pattern is None:
            continue
        pool.append((point, pattern))
        if target is None and len(pool) >= min(PATTERN_BATCH, count):
            target = Counter(pattern for _, pattern in pool).most_common(1)[0][0]
        if target is not None:
            chosen = [point for point, pattern in pool if pattern == target]
            if len(chosen) >= count:
                logger.debug(f"{g.name}: {count} points after {len(pool)} generic draws")
                return chosen[:count]
    raise RelationError(f"{g.name}: fewer than {count} generic points in {max_draws} draws")


def box_abbreviations(g: FeynmanGraph, p: KinematicPoint) -> Dict[sp.Symbol, sp.Rational]:
    """Exact C_i_j, U_i_j and detU at p."""
    quadric = quadratic_form_matrix(symanzik(g).xi).specialize(p.substitutions(g))
    det_C, U = det_and_inverse(quadric)
    values: Dict[sp.Symbol, sp.Rational] = {DET_U: 1 / det_C}
    for i in range(4):
        for j in range(i, 4):
            values[c_symbol(i + 1, j + 1)] = quadric.entries[i, j]
            values[u_symbol(i + 1, j + 1)] = U[i, j]
    return values


def box_coaction_terms(g: FeynmanGraph) -> List[FamilyTerm]:
    """
    The six middle terms of the box coaction in abbreviation symbols.

    Coefficients are in units of 1/(16 √|det C|), where every middle term
    has coefficient one.
    """
    coaction = box_coaction(g)
    terms = []
    for term in coaction.middle_terms:
        terms.append(
            FamilyTerm(
                motivic=SqrtExpr(term.motivic.argument.expr),
                derham=SqrtExpr(term.derham.argument.expr),
                coefficient=sp.Integer(1),
                label=term.provenance.replace("box-coaction face ", "f"),
            )
        )
    return terms


def _unit_circle_points(r: int, s: int, t: int, last: int = 4) -> List[SqrtExpr]:
    U, C = u_symbol, c_symbol
    denominator = U(r, s) * U(r, last) - U(r, r) * U(s, last)
    numerator = C(t, last) * U(r, last) * sp.sqrt(sp.Abs(DET_U))
    pairs = [
        (numerator, denominator),
        (numerator, denominator * sp.sqrt(1 - C(last, last) * U(last, last))),
        (U(r, last) * sp.sqrt(U(r, r) * U(s, s) - U(r, s) ** 2), denominator),
        (U(r, last), sp.sqrt(U(r, r) * U(last, last) - U(r, last) ** 2)),
    ]
    # e^{2i atan(N/D)} = (D + iN)/(D − iN)
    return [SqrtExpr((D + sp.I * N) / (D - sp.I * N)) for N, D in pairs]


def box_dilog_terms(g: FeynmanGraph) -> List[FamilyTerm]:
    """
    Middle terms of the 42 Clausen values of the box under the coaction of
    Im Li2, in units of 1/(16 √|det C|).

    Each c·Cl2(θ) contributes c · (i/2) log^m(4 sin²(θ/2)) ⊗ log^dr(e^{iθ}).
    """
    if g.edge_count != 4:
        raise RelationError(f"{g.name} is not a box")
    terms = []
    for r, s, t in itertools.permutations((1, 2, 3)):
        z = _unit_circle_points(r, s, t)
        tag = f"{r}{s}{t}"
        units = [(sp.Integer(2), z[0], f"{tag};0")]
        for level in (1, 2, 3):
            sign = sp.Integer(-1) ** level
            units.append((sign, z[0] * z[level], f"{tag};0+{level}"))
            units.append((sign, z[0] / z[level], f"{tag};0-{level}"))
        for c, w, label in units:
            middle = im_dilog_coaction(w)[1]
            terms.append(
                FamilyTerm(
                    motivic=middle.motivic.argument,
                    derham=middle.derham.argument,
                    coefficient=c * middle.motivic.coefficient,
                    label=f"Cl2[{label}]",
                )
            )
    logger.debug(f"{g.name}: {len(terms)} Clausen terms")
    return terms


def triangle_face_relation(
    g: Optional[FeynmanGraph] = None,
    seed: int = config.common.DEFAULT_SEED,
    dps: int = config.common.RELATION_PRECISION,
    max_coeff: int = config.common.MAX_COEFF,
    held_out: int = config.common.HELD_OUT_POINTS,
) -> RelationSet:
    """
    Relations among the θ¹ and θ² face logarithms of a triangle with three
    massive edges, in the order face e1 θ¹, face e1 θ², face e2 θ¹, …

    Since θ¹ = (A/C)(θ²)² on each face and the mass ratios A/C multiply to
    one around the triangle, one relation is expected.
    """
    g = g or triangle_graph()
    if g.edge_count != 3 or len(g.massive_edges) != 3:
        raise RelationError(f"{g.name} is not a triangle with three massive edges")
    xi = symanzik(g).xi
    arguments: List[SqrtExpr] = []
    labels: List[str] = []
    for face, edge in enumerate(g.edge_ids):
        keep = tuple(e for e in g.edge_ids if e != edge)
        for variant in ("theta1", "theta2"):
            period = face_period(xi.restrict([face]), keep, variant)
            arguments.append(SqrtExpr(period.argument.expr))
            labels.append(f"{variant}/{edge}")

    radicands = [radicand for argument in arguments for radicand in argument.radicands()]
    sample_count = len(arguments) + config.common.EXTRA_SAMPLE_POINTS
    points = generic_points(g, sample_count + held_out, seed, radicands)
    fam = LogFamily(
        graph=g,
        arguments=arguments,
        labels=labels,
        sample_points=points[:sample_count],
        held_out_points=points[sample_count:],
        component="dlog",
        seed=seed,
    )
    return retry_with_precision(log_basis, fam, dps=dps, max_coeff=max_coeff)


__all__ = [
    "DET_U",
    "c_symbol",
    "FamilyTerm",
    "generic_points",
    "box_abbreviations",
    "box_coaction_terms",
    "box_dilog_terms",
    "triangle_face_relation",
]
