"""
Integer relations among logarithms of algebraic functions.

A relation v over arguments x_1…x_n means ∑ v_i log x_i = 0 at every
kinematic point, that is ∏ x_i^{v_i} is a constant of absolute value one.
Relations are found on stacked evaluations over many sample points, so a
relation that holds at one point by accident is never reported.
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy.matrices.normalforms import hermite_normal_form

import config
from coactionkit import SqrtExpr
from graphkin import FeynmanGraph, KinematicPoint

# Configure module-specific logger
logger = logging.getLogger(__name__)


class RelationError(Exception):
    """Base exception for relation detection"""

    pass


class InsufficientPrecisionError(RelationError):
    """Raised when the working precision cannot separate relations from noise"""

    pass


class InconsistentRelationsError(RelationError):
    """Raised when a detected relation fails at a held-out point"""

    pass


Component = Literal["abs", "dlog"]
Abbreviations = Callable[[FeynmanGraph, KinematicPoint], Dict[sp.Symbol, sp.Rational]]


def _normalize(vector: Sequence[int]) -> Tuple[int, ...]:
    vector = [int(v) for v in vector]
    divisor = math.gcd(*vector) or 1
    vector = [v // divisor for v in vector]
    for v in vector:
        if v != 0:
            if v < 0:
                vector = [-x for x in vector]
            break
    return tuple(vector)


def integer_relations(
    values: Sequence,
    dps: int = config.common.RELATION_PRECISION,
    max_coeff: int = config.common.MAX_COEFF,
    tolerance_digits: Optional[int] = None,
) -> Optional[Tuple[int, ...]]:
    """
    Find integers v, |v_i| ≤ max_coeff, with ∑ v_i values_i = 0, by PSLQ.

    Args:
        values: Real numbers known to dps digits
        dps: Working precision
        max_coeff: Largest coefficient a relation may have
        tolerance_digits: Digits to which a relation must vanish, 3/4 of dps
            by default; values known to fewer digits need a smaller count

    Returns:
        The relation with its first non-zero entry positive, or None

    Raises:
        InsufficientPrecisionError: When the tolerance is too coarse to
            separate max_coeff-sized relations from noise
    """
    if len(values) < 2:
        raise RelationError("an integer relation needs at least two values")
    digits = tolerance_digits if tolerance_digits is not None else dps * 3 // 4
    required = len(values) * math.log10(max_coeff) + config.common.PRECISION_MARGIN
    if digits < required:
        raise InsufficientPrecisionError(
            f"{len(values)} values with coefficients up to {max_coeff} need {math.ceil(required)} digits, have {digits}"
        )
    with mp.workdps(dps):
        vector = [mp.mpf(v) for v in values]
        scale = max(abs(v) for v in vector)
        tolerance = mp.mpf(10) ** (-digits)
        for i, v in enumerate(vector):
            if abs(v) <= tolerance * max(scale, 1):
                return tuple(1 if j == i else 0 for j in range(len(vector)))
        relation = mp.pslq(vector, tol=tolerance * max(scale, 1), maxcoeff=max_coeff, maxsteps=10**5)
    if relation is None:
        logger.debug(f"no relation among {len(values)} values below {max_coeff}")
        return None
    return _normalize(relation)


class LogFamily(BaseModel):
    """
    Logarithms of algebraic arguments sampled at generic kinematic points.

    Argument order is priority order: earlier arguments enter the basis
    first. With component "abs" each row holds log|x| at one point; with
    "dlog" each point gives two rows, the real and imaginary part of the
    logarithmic derivative along a random direction, which ignores constant
    factors and branch choices of the logarithm.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph: FeynmanGraph
    arguments: List[SqrtExpr]
    labels: List[str]
    sample_points: List[KinematicPoint]
    held_out_points: List[KinematicPoint] = Field(default_factory=list)
    component: Component = "abs"
    constants: List[Tuple[str, sp.Expr]] = Field(default_factory=list)
    abbreviations: Optional[Abbreviations] = None
    seed: int = config.common.DEFAULT_SEED

    @model_validator(mode="after")
    def _check_shape(self) -> "LogFamily":
        if len(self.labels) != len(self.arguments):
            raise ValueError("one label per argument is required")
        if self.component == "dlog" and self.constants:
            raise ValueError("constant columns vanish under the logarithmic derivative")
        return self

    @property
    def column_labels(self) -> List[str]:
        return [name for name, _ in self.constants] + list(self.labels)

    def point_values(self, p: KinematicPoint) -> Dict[sp.Symbol, sp.Rational]:
        values = p.substitutions(self.graph)
        if self.abbreviations is not None:
            values.update(self.abbreviations(self.graph, p))
        return values

    def _logs(self, p: KinematicPoint, dps: int) -> List[mp.mpc]:
        from numeval import eval_expr

        values = self.point_values(p)
        logs = []
        for label, argument in zip(self.labels, self.arguments):
            x = eval_expr(SqrtExpr(argument.expr), values, dps, warn=False).value
            if x == 0:
                raise RelationError(f"argument {label} vanishes at a sample point")
            logs.append(mp.log(x))
        return logs

    def _direction(self, rng: np.random.Generator) -> Tuple[Dict[Tuple[int, int], int], Dict[str, int]]:
        keys = [(i, j) for i in range(1, len(self.graph.legs) + 1) for j in range(i, len(self.graph.legs) + 1)]
        s = {key: int(rng.integers(-5, 6)) for key in keys}
        msq = {edge.id: int(rng.integers(-5, 6)) for edge in self.graph.massive_edges}
        return s, msq

    @staticmethod
    def _shift(p: KinematicPoint, direction, step: Fraction) -> KinematicPoint:
        s_dir, m_dir = direction
        s = {key: value + step * s_dir.get(key, 0) for key, value in p.s.items()}
        msq = {key: value + step * m_dir.get(key, 0) for key, value in p.msq.items()}
        return KinematicPoint(s=s, msq=msq)

    def rows(self, p: KinematicPoint, dps: int, rng: np.random.Generator) -> List[List[mp.mpf]]:
        with mp.workdps(dps):
            if self.component == "abs":
                constants = [mp.log(abs(mp.mpf(str(sp.N(value, dps + 5))))) for _, value in self.constants]
                return [constants + [log.real for log in self._logs(p, dps)]]
            direction = self._direction(rng)
            step = Fraction(1, 10 ** max(dps // 3, 5))
            plus = self._logs(self._shift(p, direction, step), dps)
            minus = self._logs(self._shift(p, direction, -step), dps)
            h = 2 * mp.mpf(step.numerator) / step.denominator
            # the ratio stays near one, away from the cut of log
            derivative = [mp.log(mp.exp(a - b)) / h for a, b in zip(plus, minus)]
            return [[d.real for d in derivative], [d.imag for d in derivative]]

    def value_matrix(self, points: Sequence[KinematicPoint], dps: int) -> mp.matrix:
        rng = np.random.default_rng(self.seed)
        rows: List[List[mp.mpf]] = []
        for p in points:
            rows.extend(self.rows(p, dps, rng))
        with mp.workdps(dps):
            return mp.matrix(rows)


class RelationSet(BaseModel):
    """
    Relations, basis and the expansion of every column in the basis.

    Column indices count the constant columns first, then the arguments.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    labels: List[str]
    constant_count: int = 0
    relations: List[Tuple[int, ...]] = Field(default_factory=list)
    basis: List[int] = Field(default_factory=list)
    expansions: Dict[int, Dict[int, Fraction]] = Field(default_factory=dict)
    confirmation: List[float] = Field(default_factory=list)
    precision: int
    held_out: int = 0

    @property
    def argument_basis(self) -> List[int]:
        return [i for i in self.basis if i >= self.constant_count]

    @property
    def basis_size(self) -> int:
        return len(self.argument_basis)

    def lattice(self) -> sp.Matrix:
        """Relations as the rows of an integer matrix."""
        if not self.relations:
            return sp.zeros(0, len(self.labels))
        return sp.Matrix(self.relations)

    def render(self) -> str:
        lines = [f"basis ({self.basis_size}): " + ", ".join(self.labels[i] for i in self.argument_basis)]
        for relation, residual in zip(self.relations, self.confirmation):
            terms = " ".join(f"{v:+d}*log({self.labels[i]})" for i, v in enumerate(relation) if v)
            lines.append(f"  {terms} = 0    # held-out residual {residual:.2e}")
        return "\n".join(lines)


def _column(matrix: mp.matrix, index: int) -> List[mp.mpf]:
    return [matrix[row, index] for row in range(matrix.rows)]


def _norm(vector: Sequence[mp.mpf]) -> mp.mpf:
    return mp.sqrt(mp.fsum(v * v for v in vector))


def _row_residual(matrix: mp.matrix, row: int, relation: Dict[int, int]) -> mp.mpf:
    terms = [v * matrix[row, i] for i, v in relation.items() if v]
    scale = max([abs(t) for t in terms] + [mp.mpf(1)])
    return abs(mp.fsum(terms)) / scale


def log_basis(
    fam: LogFamily,
    dps: int = config.common.RELATION_PRECISION,
    max_coeff: int = config.common.MAX_COEFF,
) -> RelationSet:
    """
    Greedy multiplicative basis of a log family.

    The sample rows are folded into one number per column by a random
    integer combination. Columns are added in priority order; PSLQ on the
    folded basis columns plus the candidate decides whether an integer
    relation with coefficients up to max_coeff exists. A relation found on
    the folded values must then vanish on every sample row, and every
    relation is re-checked at the held-out points.

    Raises:
        RelationError: With fewer than #columns + EXTRA_SAMPLE_POINTS points
        InsufficientPrecisionError: When dps is too small for a PSLQ search
            over the current basis, or a relation of the folded values fails
            on a sample row
        InconsistentRelationsError: When a relation fails at a held-out point
    """
    labels = fam.column_labels
    columns = len(labels)
    needed = columns + config.common.EXTRA_SAMPLE_POINTS
    if len(fam.sample_points) < needed:
        raise RelationError(f"{columns} columns need at least {needed} sample points, got {len(fam.sample_points)}")
    logger.info(f"log basis of {columns} columns at {len(fam.sample_points)} points, {dps} digits")

    # values carry about dps/2 reliable digits once dlog differences are taken
    digits = dps // 2
    result = RelationSet(labels=labels, constant_count=len(fam.constants), precision=dps)
    with mp.workdps(dps):
        matrix = fam.value_matrix(fam.sample_points, dps)
        rng = np.random.default_rng(fam.seed)
        weights = [int(w) for w in rng.integers(1, 1000, size=matrix.rows)]
        folded = [mp.fsum(w * matrix[row, c] for row, w in enumerate(weights)) for c in range(columns)]
        zero = mp.mpf(10) ** (-digits)

        for c in range(columns):
            b = _column(matrix, c)
            if _norm(b) / max(_norm(b), mp.mpf(1)) < zero:
                result.relations.append(_normalize([1 if i == c else 0 for i in range(columns)]))
                result.expansions[c] = {}
                continue
            if not result.basis:
                result.basis.append(c)
                result.expansions[c] = {c: Fraction(1)}
                continue

            candidates = result.basis + [c]
            found = integer_relations(
                [folded[i] for i in candidates], dps=dps, max_coeff=max_coeff, tolerance_digits=digits
            )
            if found is None:
                result.basis.append(c)
                result.expansions[c] = {c: Fraction(1)}
                continue

            relation = dict(zip(candidates, found))
            if relation[c] == 0:
                raise InsufficientPrecisionError(f"basis columns before {labels[c]} are dependent at {dps} digits")
            worst = max(_row_residual(matrix, row, relation) for row in range(matrix.rows))
            if worst > zero:
                raise InsufficientPrecisionError(
                    f"column {labels[c]}: relation {found} of the folded values fails on a sample row "
                    f"(residual {mp.nstr(worst, 5)})"
                )
            vector = [relation.get(i, 0) for i in range(columns)]
            result.relations.append(_normalize(vector))
            result.expansions[c] = {i: Fraction(-v, relation[c]) for i, v in relation.items() if i != c and v}
            logger.debug(f"column {labels[c]} depends on the basis: {result.relations[-1]}")

    result.held_out = len(fam.held_out_points)
    result.confirmation = confirm_relations(fam, result.relations, dps)
    logger.info(f"log basis: {result.basis_size} arguments, {len(result.relations)} relations")
    return result


def confirm_relations(fam: LogFamily, relations: List[Tuple[int, ...]], dps: int) -> List[float]:
    """
    Largest residual of each relation over the held-out points.

    Raises:
        InconsistentRelationsError: When a residual exceeds 10^(−dps/2)
    """
    if not relations:
        return []
    if not fam.held_out_points:
        logger.warning("no held-out points; relations are unconfirmed")
        return [float("nan")] * len(relations)
    residuals = []
    with mp.workdps(dps):
        matrix = fam.value_matrix(fam.held_out_points, dps)
        tolerance = mp.mpf(10) ** (-(dps // 2))
        for relation in relations:
            worst = mp.mpf(0)
            for row in range(matrix.rows):
                terms = [v * matrix[row, i] for i, v in enumerate(relation) if v]
                scale = max([abs(t) for t in terms] + [mp.mpf(1)])
                worst = max(worst, abs(mp.fsum(terms)) / scale)
            if worst > tolerance:
                raise InconsistentRelationsError(
                    f"relation {relation} fails at a held-out point: residual {mp.nstr(worst, 5)}"
                )
            residuals.append(float(worst))
    return residuals


def same_lattice(a: RelationSet, b: RelationSet) -> bool:
    """True when both relation sets span the same integer lattice."""
    if len(a.labels) != len(b.labels):
        return False
    if not a.relations or not b.relations:
        return not a.relations and not b.relations
    return hermite_normal_form(a.lattice().T) == hermite_normal_form(b.lattice().T)


def verify_symbolic(relation: Sequence[int], arguments: Sequence[SqrtExpr]) -> Optional[bool]:
    """
    Check ∏ x_i^{v_i} = ±1 exactly for arguments without square roots.

    Returns:
        None when an argument carries a radical, else whether the product
        simplifies to ±1
    """
    if any(argument.radicands() for argument in arguments):
        return None
    product = sp.Integer(1)
    for v, argument in zip(relation, arguments):
        if v:
            product *= argument.resolved() ** v
    product = sp.cancel(sp.together(product))
    return product in (sp.Integer(1), sp.Integer(-1))


from .retry import retry_with_precision  # noqa: E402
from .families import (  # noqa: E402
    FamilyTerm,
    box_abbreviations,
    box_coaction_terms,
    box_dilog_terms,
    generic_points,
    triangle_face_relation,
)
from .reduce import (  # noqa: E402
    BasisSizeMismatchError,
    ReducedTerm,
    ReductionReport,
    coaction_reduce,
    reduce_box_dilogs,
)

__all__ = [
    "RelationError",
    "InsufficientPrecisionError",
    "InconsistentRelationsError",
    "BasisSizeMismatchError",
    "LogFamily",
    "RelationSet",
    "FamilyTerm",
    "ReducedTerm",
    "ReductionReport",
    "integer_relations",
    "log_basis",
    "confirm_relations",
    "same_lattice",
    "verify_symbolic",
    "retry_with_precision",
    "generic_points",
    "box_abbreviations",
    "box_coaction_terms",
    "box_dilog_terms",
    "triangle_face_relation",
    "coaction_reduce",
    "reduce_box_dilogs",
]
