import itertools
from fractions import Fraction

import mpmath as mp
import pytest
import sympy as sp

import config
from cli import JobSpec, run
from coactionkit import SqrtExpr, f_jk
from graphkin import cycle_graph
from relations import (
    BasisSizeMismatchError,
    FamilyTerm,
    InsufficientPrecisionError,
    LogFamily,
    RelationError,
    RelationSet,
    coaction_reduce,
    generic_points,
    integer_relations,
    log_basis,
    reduce_box_dilogs,
    retry_with_precision,
    same_lattice,
    triangle_face_relation,
    verify_symbolic,
)
from relations import reduce as reduce_module


def test_integer_relation_between_logs():
    with mp.workdps(60):
        values = [mp.log(2), mp.log(4)]
    assert integer_relations(values, dps=60) == (2, -1)


def test_no_relation_below_bound():
    with mp.workdps(60):
        values = [mp.log(2), mp.log(3)]
    assert integer_relations(values, dps=60, max_coeff=100) is None


def test_zero_value_is_its_own_relation():
    assert integer_relations([mp.mpf(1), mp.mpf(0)], dps=60) == (0, 1)


def test_integer_relations_guard_precision():
    with pytest.raises(InsufficientPrecisionError):
        integer_relations([1, 2, 3], dps=10)
    with pytest.raises(RelationError):
        integer_relations([1], dps=60)


def test_retry_raises_precision_until_success():
    seen = []

    def operation(dps):
        seen.append(dps)
        if dps < 90:
            raise InsufficientPrecisionError("not yet")
        return dps

    assert retry_with_precision(operation, dps=60) == 90
    assert seen == [60, 90]


def test_retry_gives_up_at_the_limit():
    def operation(dps):
        raise InsufficientPrecisionError("never")

    with pytest.raises(InsufficientPrecisionError):
        retry_with_precision(operation, dps=60, max_precision=80)
    with pytest.raises(ValueError):
        retry_with_precision(operation, dps=60, growth=1)


def test_verify_symbolic():
    x = sp.Symbol("x")
    assert verify_symbolic((1, 1), [SqrtExpr(x), SqrtExpr(1 / x)])
    assert verify_symbolic((1, -1), [SqrtExpr(x), SqrtExpr(1 / x)]) is False
    assert verify_symbolic((1, 1), [SqrtExpr(sp.sqrt(x)), SqrtExpr(x)]) is None


def test_same_lattice_ignores_generators():
    labels = ["a", "b", "c"]
    first = RelationSet(labels=labels, relations=[(1, -1, 0), (0, 1, -1)], precision=60)
    second = RelationSet(labels=labels, relations=[(1, 0, -1), (0, 1, -1)], precision=60)
    other = RelationSet(labels=labels, relations=[(1, 1, 0)], precision=60)
    assert same_lattice(first, second)
    assert not same_lattice(first, other)


def test_log_basis_on_mass_products():
    g = cycle_graph(2)
    m1, m2 = sp.Symbol("m1^2"), sp.Symbol("m2^2")
    points = generic_points(g, 12, seed=config.common.DEFAULT_SEED)
    fam = LogFamily(
        graph=g,
        arguments=[SqrtExpr(m1), SqrtExpr(m2), SqrtExpr(m1 * m2)],
        labels=["m1", "m2", "m1m2"],
        sample_points=points[:8],
        held_out_points=points[8:],
    )
    result = log_basis(fam)
    assert result.basis == [0, 1]
    assert result.relations == [(1, 1, -1)]
    assert all(residual < 1e-25 for residual in result.confirmation)


def test_log_basis_rejects_near_rational_fits():
    g = cycle_graph(2)
    m1 = sp.Symbol("m1^2")
    points = generic_points(g, 10, seed=config.common.DEFAULT_SEED)
    fam = LogFamily(
        graph=g,
        arguments=[SqrtExpr(m1), SqrtExpr(m1 ** sp.Rational(3333334, 10**7))],
        labels=["m1", "m1^0.3333334"],
        sample_points=points[:7],
        held_out_points=points[7:],
    )
    # the coefficient ratio is within 1e-7 of 1/3, but the exact relation is far above max_coeff
    result = log_basis(fam, max_coeff=10**4)
    assert result.basis == [0, 1]
    assert result.relations == []

    wide = log_basis(fam, max_coeff=10**7)
    assert wide.basis == [0]
    assert wide.relations == [(1666667, -5000000)]
    assert wide.expansions[1] == {0: Fraction(1666667, 5000000)}


def test_log_basis_expansions_come_from_integer_relations():
    g = cycle_graph(2)
    m1, m2 = sp.Symbol("m1^2"), sp.Symbol("m2^2")
    points = generic_points(g, 12, seed=config.common.DEFAULT_SEED)
    fam = LogFamily(
        graph=g,
        arguments=[SqrtExpr(m1 * m2), SqrtExpr(m2), SqrtExpr(m1**3 / m2**2)],
        labels=["m1m2", "m2", "m1^3/m2^2"],
        sample_points=points[:8],
        held_out_points=points[8:],
    )
    result = log_basis(fam)
    assert result.relations == [(3, -5, -1)]
    assert result.expansions[2] == {0: Fraction(3), 1: Fraction(-5)}


def test_log_basis_needs_enough_points():
    g = cycle_graph(2)
    fam = LogFamily(
        graph=g,
        arguments=[SqrtExpr(sp.Symbol("m1^2"))],
        labels=["m1"],
        sample_points=generic_points(g, 2),
    )
    with pytest.raises(RelationError):
        log_basis(fam)


def test_family_shape_is_validated():
    g = cycle_graph(2)
    with pytest.raises(ValueError):
        LogFamily(graph=g, arguments=[SqrtExpr(1)], labels=[], sample_points=[])


def test_triangle_faces_have_one_relation():
    result = triangle_face_relation()
    assert result.relations == [(1, -2, -1, 2, 1, -2)]
    assert result.basis_size == 5


@pytest.mark.slow
def test_box_dilogs_reduce_to_six_terms(box):
    report = reduce_box_dilogs(box)
    assert report.input_terms == 42
    assert report.survivor_count == 6
    assert (report.motivic.basis_size, report.derham.basis_size) == (27, 20)
    expected = {f_jk(j, k).expr for j, k in itertools.combinations(range(1, 5), 2)}
    assert {term.derham.expr for term in report.terms} == expected
    ratios = list(report.reference_ratios.values())
    assert len(ratios) == 6
    assert all(not sp.sympify(ratio).free_symbols for ratio in ratios)
    assert len(set(ratios)) == 1 and ratios[0] != 0


def test_box_reduction_mismatch_carries_both_lattices(box, monkeypatch):
    small = coaction_reduce(mass_terms(2), cycle_graph(2))
    monkeypatch.setattr(reduce_module, "coaction_reduce", lambda *args, **kwargs: small)
    with pytest.raises(BasisSizeMismatchError) as caught:
        reduce_box_dilogs(box)
    assert caught.value.motivic is small.motivic
    assert caught.value.derham is small.derham
    assert caught.value.survivors == 1
    assert isinstance(caught.value, RelationError)

    result = run(JobSpec(command="relations", family="box-dilogs"))
    assert result.exit_code == 2
    assert result.report["error"]["type"] == "BasisSizeMismatchError"
    assert result.report["motivic_lattice"]["basis_size"] == small.motivic.basis_size
    assert result.report["derham_lattice"]["basis_size"] == small.derham.basis_size


def mass_terms(first_coefficient):
    m1, m2 = sp.Symbol("m1^2"), sp.Symbol("m2^2")
    return [
        FamilyTerm(motivic=SqrtExpr(m1), derham=SqrtExpr(m2), coefficient=sp.Integer(first_coefficient), label="a"),
        FamilyTerm(motivic=SqrtExpr(m2), derham=SqrtExpr(m2), coefficient=sp.Integer(1), label="b"),
        FamilyTerm(motivic=SqrtExpr(m1 * m2), derham=SqrtExpr(m2), coefficient=sp.Integer(-1), label="c"),
    ]


def test_coaction_reduce_cancels_product_logs():
    report = coaction_reduce(mass_terms(1), cycle_graph(2))
    assert report.input_terms == 3
    assert report.survivor_count == 0


def test_coaction_reduce_keeps_surviving_coefficients():
    report = coaction_reduce(mass_terms(2), cycle_graph(2))
    assert report.survivor_count == 1
    (term,) = report.terms
    assert (term.motivic_label, term.derham_label) == ("m:a", "dr:a")
    assert term.coefficient == 1
