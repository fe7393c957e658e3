"""
The massive box in four dimensions as a sum of 42 Clausen values.

For every ordering (r, s, t) of the first three edges, with the last edge
fixed, four angles ν⁰…ν³ are built from the quadric matrix C and its inverse
U; each ordering contributes seven values of Im Li₂ on the unit circle.
"""

import itertools
import logging
from typing import List, Tuple

import mpmath as mp
from pydantic import BaseModel, ConfigDict

import config
from graphkin import FeynmanGraph, KinematicPoint, require_one_loop
from polyalg import det_and_inverse, quadratic_form_matrix
from symanzik import symanzik

from . import NegativeRadicandError, NumevalError, _check_precision

# Configure module-specific logger
logger = logging.getLogger(__name__)


class OWTerm(BaseModel):
    """Contribution of one ordering (r, s, t) of the first three edges."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    permutation: Tuple[int, int, int]
    nu: Tuple[mp.mpf, mp.mpf, mp.mpf, mp.mpf]
    values: Tuple[mp.mpf, ...]
    total: mp.mpf


class OWEvaluation(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: mp.mpf
    literal_value: mp.mpf
    normalization: int
    prefactor: mp.mpf
    terms: List[OWTerm]
    precision: int

    @property
    def clausen_count(self) -> int:
        return sum(len(term.values) for term in self.terms)


def _atan_ratio(numerator: mp.mpf, denominator: mp.mpf) -> mp.mpf:
    if denominator == 0:
        if numerator == 0:
            raise NumevalError("ν angle undefined: 0/0")
        return mp.sign(numerator) * mp.pi / 2
    return mp.atan(numerator / denominator)


def _real_sqrt(radicand: mp.mpf, label: str) -> mp.mpf:
    if radicand < 0:
        raise NegativeRadicandError(f"radicand of {label} is negative: {mp.nstr(radicand, 10)}")
    return mp.sqrt(radicand)


def _nu(C, U, det_U: mp.mpf, r: int, s: int, t: int, last: int) -> Tuple[mp.mpf, ...]:
    denominator = U[r, s] * U[r, last] - U[r, r] * U[s, last]
    numerator0 = C[t, last] * U[r, last] * mp.sqrt(abs(det_U))
    nu0 = _atan_ratio(numerator0, denominator)
    nu1 = _atan_ratio(numerator0, denominator * _real_sqrt(1 - C[last, last] * U[last, last], "nu1"))
    nu2 = _atan_ratio(U[r, last] * _real_sqrt(U[r, r] * U[s, s] - U[r, s] ** 2, "nu2"), denominator)
    nu3 = _atan_ratio(U[r, last], _real_sqrt(U[r, r] * U[last, last] - U[r, last] ** 2, "nu3"))
    return nu0, nu1, nu2, nu3


def ow_terms(C, U, det_C: mp.mpf) -> List[OWTerm]:
    """The six orderings with their seven Clausen values each."""
    last = 3
    det_U = 1 / det_C
    terms = []
    for r, s, t in itertools.permutations(range(3)):
        nu = _nu(C, U, det_U, r, s, t, last)
        values = [2 * mp.clsin(2, 2 * nu[0])]
        for level in (1, 2, 3):
            sign = (-1) ** level
            values.append(sign * mp.clsin(2, 2 * nu[0] + 2 * nu[level]))
            values.append(sign * mp.clsin(2, 2 * nu[0] - 2 * nu[level]))
        terms.append(
            OWTerm(
                permutation=(r + 1, s + 1, t + 1),
                nu=tuple(nu),
                values=tuple(values),
                total=mp.fsum(values),
            )
        )
    return terms


def ow_quadric_value(C, dps: int = config.common.DEFAULT_PRECISION) -> OWEvaluation:
    """
    Evaluate the Clausen sum for a numeric 4×4 quadric matrix C.

    The literal value carries the 1/(16 √|det C|) prefactor; the returned
    value is the parametric integral, the literal value times
    BOX_NORMALIZATION.
    """
    _check_precision(dps)
    with mp.workdps(dps):
        C = mp.matrix(C)
        det_C = mp.det(C)
        if det_C == 0:
            raise NumevalError("quadric matrix is singular")
        U = C**-1
        terms = ow_terms(C, U, det_C)
        prefactor = 1 / (16 * mp.sqrt(abs(det_C)))
        literal = prefactor * mp.fsum(term.total for term in terms)
        normalization = config.common.BOX_NORMALIZATION
        value = normalization * literal
    return OWEvaluation(
        value=value,
        literal_value=literal,
        normalization=normalization,
        prefactor=prefactor,
        terms=terms,
        precision=dps,
    )


def ow_box_value(
    g: FeynmanGraph, p: KinematicPoint, dps: int = config.common.DEFAULT_PRECISION
) -> OWEvaluation:
    """
    Evaluate the four-mass box by the 42-dilogarithm formula.

    Raises:
        NegativeRadicandError: If one of the ν radicands is negative at p
        SingularMatrixError: If det C vanishes at p
    """
    require_one_loop(g)
    if g.edge_count != 4 or len(g.massive_edges) != 4:
        raise NumevalError(f"{g.name} is not a box with four massive edges")
    _check_precision(dps)
    quadric = quadratic_form_matrix(symanzik(g).xi).specialize(p.substitutions(g))
    # raises SingularMatrixError before any floating point work
    det_and_inverse(quadric)

    with mp.workdps(dps):
        C = mp.matrix([[mp.mpf(x.p) / x.q for x in quadric.entries.row(i)] for i in range(4)])
    evaluation = ow_quadric_value(C, dps)
    logger.info(f"{g.name}: 42-dilogarithm value {mp.nstr(evaluation.value, 15)}")
    return evaluation


__all__ = ["OWTerm", "OWEvaluation", "ow_terms", "ow_quadric_value", "ow_box_value"]
