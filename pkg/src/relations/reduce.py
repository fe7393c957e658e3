"""
Reduction of a sum of log ⊗ log tensor terms to a minimal form.

Motivic logarithms are rewritten in a multiplicative basis, de Rham
cofactors are collected per motivic basis element and rewritten in a de Rham
basis, and whatever does not cancel survives with an exact rational
coefficient taken from the integer relations.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field

import config
from coactionkit import SqrtExpr
from graphkin import FeynmanGraph

from . import Abbreviations, LogFamily, RelationError, RelationSet, log_basis
from .families import FamilyTerm, box_abbreviations, box_coaction_terms, box_dilog_terms, generic_points
from .retry import retry_with_precision

# Configure module-specific logger
logger = logging.getLogger(__name__)

MOTIVIC_CONSTANTS: Tuple[Tuple[str, sp.Expr], ...] = (("2", sp.Integer(2)),)
BOX_BASIS_SIZES = (27, 20)
BOX_SURVIVORS = 6


class ReducedTerm(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    motivic_label: str
    derham_label: str
    motivic: Optional[SqrtExpr]
    derham: SqrtExpr
    coefficient: sp.Expr

    def render(self) -> str:
        return f"({sp.sstr(self.coefficient)}) log^m({self.motivic_label}) (x) log^dr({self.derham_label})"


class ReductionReport(BaseModel):
    """Surviving terms, both bases and the comparison with reference terms."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph_name: str
    input_terms: int
    terms: List[ReducedTerm]
    motivic: RelationSet
    derham: RelationSet
    reference_ratios: Dict[str, sp.Expr] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    @property
    def survivor_count(self) -> int:
        return len(self.terms)

    def render(self) -> str:
        lines = [
            f"Reduction of {self.input_terms} terms of {self.graph_name}: {self.survivor_count} survive",
            f"motivic basis size {self.motivic.basis_size}, de Rham basis size {self.derham.basis_size}",
        ]
        lines.extend(f"  {term.render()}" for term in self.terms)
        for label, ratio in self.reference_ratios.items():
            lines.append(f"  ratio to {label}: {sp.sstr(ratio)}")
        lines.extend(f"  note: {note}" for note in self.notes)
        return "\n".join(lines)


def _index(expressions: Sequence[SqrtExpr], labels: Sequence[str]) -> Tuple[List[SqrtExpr], List[str], Dict[SqrtExpr, int]]:
    unique: List[SqrtExpr] = []
    names: List[str] = []
    position: Dict[SqrtExpr, int] = {}
    for expression, label in zip(expressions, labels):
        if expression not in position:
            position[expression] = len(unique)
            unique.append(expression)
            names.append(label)
    return unique, names, position


def coaction_reduce(
    terms: Sequence[FamilyTerm],
    graph: FeynmanGraph,
    reference: Sequence[FamilyTerm] = (),
    abbreviations: Optional[Abbreviations] = None,
    seed: int = config.common.DEFAULT_SEED,
    dps: int = config.common.RELATION_PRECISION,
    max_coeff: int = config.common.MAX_COEFF,
    held_out: int = config.common.HELD_OUT_POINTS,
    motivic_constants: Sequence[Tuple[str, sp.Expr]] = MOTIVIC_CONSTANTS,
) -> ReductionReport:
    """
    Reduce `terms` to surviving tensor terms.

    Reference terms enter both bases first, and for each of them the ratio
    of the surviving coefficient to the reference coefficient is reported.

    Raises:
        InsufficientPrecisionError: When the precision limit is reached
        InconsistentRelationsError: When a relation fails at a held-out point
    """
    everything = list(reference) + list(terms)
    motivic, motivic_names, motivic_at = _index(
        [t.motivic for t in everything], [f"m:{t.label}" for t in everything]
    )
    derham, derham_names, derham_at = _index(
        [t.derham for t in everything], [f"dr:{t.label}" for t in everything]
    )
    radicands = list(dict.fromkeys(r for e in motivic + derham for r in e.radicands()))
    sample_count = max(len(motivic) + len(motivic_constants), len(derham)) + config.common.EXTRA_SAMPLE_POINTS
    points = generic_points(graph, sample_count + held_out, seed, radicands, abbreviations)
    samples, checks = points[:sample_count], points[sample_count:]
    logger.info(
        f"{graph.name}: reducing {len(terms)} terms over {len(motivic)} motivic and {len(derham)} de Rham logarithms"
    )

    motivic_set = retry_with_precision(
        log_basis,
        LogFamily(
            graph=graph,
            arguments=motivic,
            labels=motivic_names,
            sample_points=samples,
            held_out_points=checks,
            component="abs",
            constants=list(motivic_constants),
            abbreviations=abbreviations,
            seed=seed,
        ),
        dps=dps,
        max_coeff=max_coeff,
    )
    derham_set = retry_with_precision(
        log_basis,
        LogFamily(
            graph=graph,
            arguments=derham,
            labels=derham_names,
            sample_points=samples,
            held_out_points=checks,
            component="dlog",
            abbreviations=abbreviations,
            seed=seed,
        ),
        dps=dps,
        max_coeff=max_coeff,
    )

    offset = motivic_set.constant_count
    collected: Dict[Tuple[int, int], sp.Expr] = defaultdict(lambda: sp.Integer(0))
    for term in terms:
        m_expansion = motivic_set.expansions[offset + motivic_at[term.motivic]]
        d_expansion = derham_set.expansions[derham_at[term.derham]]
        for m, m_coefficient in m_expansion.items():
            for d, d_coefficient in d_expansion.items():
                weight = sp.Rational(m_coefficient.numerator, m_coefficient.denominator) * sp.Rational(
                    d_coefficient.numerator, d_coefficient.denominator
                )
                collected[(m, d)] += term.coefficient * weight

    survivors: List[ReducedTerm] = []
    for (m, d), coefficient in sorted(collected.items()):
        coefficient = sp.simplify(coefficient)
        if coefficient == 0:
            continue
        survivors.append(
            ReducedTerm(
                motivic_label=motivic_set.labels[m],
                derham_label=derham_set.labels[d],
                motivic=motivic[m - offset] if m >= offset else None,
                derham=derham[d],
                coefficient=coefficient,
            )
        )

    notes: List[str] = []
    ratios: Dict[str, sp.Expr] = {}
    for ref in reference:
        m = offset + motivic_at[ref.motivic]
        d = derham_at[ref.derham]
        if m not in motivic_set.basis or d not in derham_set.basis:
            notes.append(f"reference term {ref.label} is not a basis pair")
            continue
        ratios[ref.label] = sp.simplify(collected.get((m, d), sp.Integer(0)) / ref.coefficient)

    logger.info(f"{graph.name}: {len(survivors)} terms survive the reduction")
    return ReductionReport(
        graph_name=graph.name,
        input_terms=len(terms),
        terms=survivors,
        motivic=motivic_set,
        derham=derham_set,
        reference_ratios=ratios,
        notes=notes,
    )


class BasisSizeMismatchError(RelationError):
    """Raised when a box reduction ends with unexpected basis sizes or survivors"""

    def __init__(self, message: str, motivic: RelationSet, derham: RelationSet, survivors: int):
        super().__init__(message)
        self.motivic = motivic
        self.derham = derham
        self.survivors = survivors


def reduce_box_dilogs(
    g: FeynmanGraph,
    seed: int = config.common.DEFAULT_SEED,
    dps: int = config.common.RELATION_PRECISION,
    max_coeff: int = config.common.MAX_COEFF,
    held_out: int = config.common.HELD_OUT_POINTS,
) -> ReductionReport:
    """
    Reduce the 42 Clausen terms of the box with the six box coaction terms
    first in both bases, and report survivors against the closed form.

    Raises:
        BasisSizeMismatchError: Unless the bases have 27 motivic and 20 de
            Rham arguments and six terms survive; carries both relation sets
    """
    report = coaction_reduce(
        box_dilog_terms(g),
        g,
        reference=box_coaction_terms(g),
        abbreviations=box_abbreviations,
        seed=seed,
        dps=dps,
        max_coeff=max_coeff,
        held_out=held_out,
    )
    sizes = (report.motivic.basis_size, report.derham.basis_size)
    if sizes != BOX_BASIS_SIZES or report.survivor_count != BOX_SURVIVORS:
        message = (
            f"{g.name}: basis sizes {sizes[0]}/{sizes[1]} with {report.survivor_count} surviving terms, "
            f"expected {BOX_BASIS_SIZES[0]}/{BOX_BASIS_SIZES[1]} with {BOX_SURVIVORS}"
        )
        logger.error(message)
        raise BasisSizeMismatchError(message, report.motivic, report.derham, report.survivor_count)
    return report


__all__ = ["BasisSizeMismatchError", "ReducedTerm", "ReductionReport", "coaction_reduce", "reduce_box_dilogs"]
