import mpmath as mp
import pytest
import sympy as sp

from coactionkit import (
    ChartError,
    CoactionError,
    CoincidentPointsError,
    UnsupportedConfigurationError,
    admissible_charts,
    blowup_pullback,
    box_coaction,
    bubble_period,
    cross_ratio,
    dilog_coaction,
    im_dilog_coaction,
    massless_geometry,
    prefactor_identity,
    triangle_coaction,
    weight_collapse_residual,
    weight_graded_dims,
)
from coactionkit.dilog import DIVERGENT_FLAG
from coactionkit.expr import SqrtExpr
from graphkin import KinematicPoint, cycle_graph, triangle_graph


def test_cross_ratio_with_point_at_infinity():
    assert cross_ratio(0, sp.oo, 2, 3) == SqrtExpr(sp.Rational(2, 3))
    assert cross_ratio(0, 1, 2, 3) == SqrtExpr(sp.Rational(4, 3))


def test_cross_ratio_rejects_coincident_points():
    with pytest.raises(CoincidentPointsError):
        cross_ratio(0, 1, 1, 5)
    with pytest.raises(CoincidentPointsError):
        cross_ratio(sp.oo, sp.oo, 1, 2)


def test_box_coaction_shape(box, box_point):
    coaction = box_coaction(box, box_point)
    assert len(coaction.terms) == 8
    assert coaction.terms[0].weight == (4, 0)
    assert coaction.terms[-1].weight == (0, 4)
    assert all(term.weight == (2, 2) for term in coaction.middle_terms)
    assert len(coaction.middle_terms) == 6
    assert "face {e1,e2}" in coaction.middle_terms[0].provenance


def test_box_prefactor_identity(box, box_point):
    assert all(residual == 0 for residual in prefactor_identity(box, box_point))


def test_box_needs_massive_edges():
    with pytest.raises(CoactionError):
        box_coaction(cycle_graph(4, masses=["m1", None, "m3", "m4"]))


@pytest.mark.parametrize(
    "masses, middle",
    [
        (["m1", "m2", "m3"], 5),
        (["m1", None, "m3"], 4),
        ([None, None, "m3"], 3),
        ([None, None, None], 2),
    ],
)
def test_triangle_middle_terms_by_vanishing_masses(masses, middle):
    coaction = triangle_coaction(triangle_graph(masses))
    assert len(coaction.middle_terms) == middle
    assert len(coaction.terms) == middle + 2


def test_massless_triangle_carries_markers():
    coaction = triangle_coaction(triangle_graph([None, None, None]))
    assert coaction.markers == (sp.Symbol("a_1"), sp.Symbol("a_2"))
    assert all(term.motivic.kind == "log_combination" for term in coaction.middle_terms)


def test_massless_geometry_discriminant_is_kallen():
    geometry = massless_geometry(triangle_graph([None, None, None]))
    q1, q2, q3 = geometry.q_squared
    kallen = q1**2 + q2**2 + q3**2 - 2 * q1 * q2 - 2 * q1 * q3 - 2 * q2 * q3
    assert sp.expand(geometry.kallen - kallen) == 0


def test_massless_geometry_needs_massless_edges():
    with pytest.raises(UnsupportedConfigurationError):
        massless_geometry(triangle_graph())


def test_admissible_charts_follow_massless_edges():
    assert admissible_charts(triangle_graph()) == []
    assert admissible_charts(triangle_graph(["m1", None, "m3"])) == ["13,1", "13,2"]


@pytest.mark.parametrize("chart", ["13,1", "13,2"])
def test_blowup_removes_the_pole(chart):
    report = blowup_pullback(triangle_graph(["m1", None, "m3"]), chart)
    assert report.order_xi == 1
    assert report.order_jacobian == 1
    assert report.certified


def test_blowup_at_massive_vertex_is_rejected():
    with pytest.raises(ChartError):
        blowup_pullback(triangle_graph(["m1", None, "m3"]), "23,1")
    with pytest.raises(ChartError):
        blowup_pullback(triangle_graph(), "1x,1")


def test_bubble_theta1_matches_root_form():
    g = cycle_graph(2)
    period = bubble_period(g, "theta1")
    values = KinematicPoint.uniform(g).substitutions(g)
    with mp.workdps(30):
        difference = period.value(values, dps=30) - period.root_form_value(values, dps=30)
        assert abs(difference) < mp.mpf(10) ** -25


def test_bubble_variants_need_mass_patterns():
    with pytest.raises(UnsupportedConfigurationError):
        bubble_period(cycle_graph(2, masses=[None, "m2"]), "theta1")
    with pytest.raises(UnsupportedConfigurationError):
        bubble_period(cycle_graph(2), "theta2")
    period = bubble_period(cycle_graph(2, masses=[None, "m2"]), "theta2")
    assert period.chart == ("e1", "e2")


def test_dilog_coaction_terms():
    terms = dilog_coaction(sp.Rational(1, 2))
    assert [term.weight for term in terms] == [(4, 0), (2, 2), (0, 4)]
    assert [term.motivic.kind for term in terms] == ["li2", "li1", "unit"]
    assert all(not term.flags for term in terms)


def test_dilog_at_one_flags_divergent_middle_term():
    terms = dilog_coaction(1)
    assert terms[1].flags == (DIVERGENT_FLAG,)
    assert len(terms) == 3


def test_im_dilog_collapses_middle_terms():
    terms = im_dilog_coaction(sp.Symbol("z"))
    assert len(terms) == 3
    assert terms[1].motivic.coefficient == sp.I / 2
    assert weight_collapse_residual() == 0


def test_im_dilog_rejects_zero():
    with pytest.raises(CoactionError):
        im_dilog_coaction(0)


@pytest.mark.parametrize(
    "n, dims",
    [
        (3, (1, 6, 1)),
        (4, (1, 10, 5)),
        (5, (1, 15, 15, 1)),
        (6, (1, 21, 35, 6)),
        (7, (1, 28, 70, 20)),
        (8, (1, 36, 126, 48)),
    ],
)
def test_weight_graded_dims(n, dims):
    assert weight_graded_dims(n) == dims


@pytest.mark.parametrize("v", [0, 1, 2, 3])
def test_triangle_graded_dims(v):
    assert weight_graded_dims(3, vanishing=v) == (1, 5 - v, 1)


def test_graded_dims_out_of_range():
    with pytest.raises(CoactionError):
        weight_graded_dims(2)
    with pytest.raises(CoactionError):
        weight_graded_dims(4, vanishing=1)
