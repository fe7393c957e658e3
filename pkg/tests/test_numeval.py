from fractions import Fraction

import mpmath as mp
import pytest
import sympy as sp

import config
from coactionkit import bubble_period
from graphkin import KinematicPoint, cycle_graph, triangle_graph
from numeval import (
    DivergentIntegralError,
    NonEuclideanError,
    NumericZeroDivisionError,
    NumevalError,
    PrecisionLimitError,
    eval_expr,
    im_li2_unit,
    li2,
    ow_box_value,
    ow_quadric_value,
    parametric_quadrature,
)
from polyalg import quadratic_form_matrix
from symanzik import build_integrand, symanzik


def test_li2_special_values():
    with mp.workdps(30):
        assert abs(li2(1, dps=30) - mp.pi**2 / 6) < mp.mpf(10) ** -28
        assert abs(li2(-1, dps=30) + mp.pi**2 / 12) < mp.mpf(10) ** -28


def test_li2_reflection():
    z = mp.mpf("0.3")
    with mp.workdps(30):
        lhs = li2(z, dps=30) + li2(1 - z, dps=30)
        rhs = mp.pi**2 / 6 - mp.log(z) * mp.log(1 - z)
        assert abs(lhs - rhs) < mp.mpf(10) ** -25


def test_clausen_at_right_angle_is_catalan():
    with mp.workdps(30):
        assert abs(im_li2_unit(mp.pi / 2, dps=30) - mp.catalan) < mp.mpf(10) ** -25


def test_precision_limit():
    with pytest.raises(PrecisionLimitError):
        li2(0.5, dps=config.common.MAX_PRECISION + 1)


def test_eval_expr_flags_negative_radicands():
    x = sp.Symbol("x")
    result = eval_expr(sp.sqrt(x), {x: sp.Integer(-4)}, dps=20)
    assert result.negative_radicand
    assert not result.is_real
    assert abs(result.value - 2j) < 1e-15


def test_eval_expr_errors():
    x, y = sp.symbols("x y")
    with pytest.raises(NumericZeroDivisionError):
        eval_expr(1 / x, {x: sp.Integer(0)})
    with pytest.raises(NumevalError):
        eval_expr(x + y, {x: sp.Integer(1)})


def test_massless_bubble_in_four_dimensions_is_one():
    g = cycle_graph(2)
    result = parametric_quadrature(build_integrand(g, 4), KinematicPoint.uniform(g))
    assert result.value == pytest.approx(1.0, rel=1e-10)


def test_bubble_in_two_dimensions_matches_root_form():
    g = cycle_graph(2)
    p = KinematicPoint.uniform(g)
    result = parametric_quadrature(build_integrand(g, 2), p)
    reference = bubble_period(g, "theta1").root_form_value(p.substitutions(g))
    assert abs(reference.imag) < 1e-12
    assert result.relative_error(float(reference.real)) < 1e-8


def test_bubble_monte_carlo_agrees_with_adaptive():
    g = cycle_graph(2)
    p = KinematicPoint.uniform(g)
    ig = build_integrand(g, 2)
    adaptive = parametric_quadrature(ig, p, method="adaptive")
    mc = parametric_quadrature(ig, p, method="mc", seed=config.common.DEFAULT_SEED)
    assert mc.seed == config.common.DEFAULT_SEED
    assert mc.relative_error(adaptive.value) < 1e-3


def test_divergent_integrand_is_refused():
    g = triangle_graph(["m1", None, "m3"])
    with pytest.raises(DivergentIntegralError):
        parametric_quadrature(build_integrand(g, 2), KinematicPoint.uniform(g))


def test_non_euclidean_point_is_refused():
    g = cycle_graph(3)
    p = KinematicPoint.uniform(g)
    s = dict(p.s)
    s[(1, 1)] = Fraction(0)
    with pytest.raises(NonEuclideanError):
        parametric_quadrature(build_integrand(g, 4), KinematicPoint(s=s, msq=p.msq))


def test_ow_box_needs_four_masses():
    g = cycle_graph(4, masses=["m1", None, "m3", "m4"])
    with pytest.raises(NumevalError):
        ow_box_value(g, KinematicPoint.uniform(g))


def test_bubble_error_estimates_bound_the_actual_error():
    g = cycle_graph(2)
    p = KinematicPoint.uniform(g)
    ig = build_integrand(g, 2)
    reference = float(bubble_period(g, "theta1").root_form_value(p.substitutions(g)).real)
    adaptive = parametric_quadrature(ig, p, method="adaptive")
    assert abs(adaptive.value - reference) <= adaptive.error_estimate + 1e-14 * abs(reference)
    mc = parametric_quadrature(ig, p, method="mc", budget=10**5)
    assert abs(mc.value - reference) <= 5 * mc.error_estimate


def test_ow_box_reports_literal_sum_and_normalization(box, box_point):
    evaluation = ow_box_value(box, box_point, dps=30)
    assert evaluation.clausen_count == 42
    assert evaluation.normalization == config.common.BOX_NORMALIZATION
    with mp.workdps(30):
        assert abs(evaluation.value - evaluation.normalization * evaluation.literal_value) < mp.mpf(10) ** -25
        total = mp.fsum(term.total for term in evaluation.terms)
        assert abs(evaluation.literal_value - evaluation.prefactor * total) < mp.mpf(10) ** -25


DIHEDRAL = [
    (0, 1, 2, 3),
    (1, 2, 3, 0),
    (2, 3, 0, 1),
    (3, 0, 1, 2),
    (3, 2, 1, 0),
    (0, 3, 2, 1),
    (1, 0, 3, 2),
    (2, 1, 0, 3),
]


@pytest.mark.parametrize("order", DIHEDRAL)
def test_ow_box_is_dihedral_invariant(box, box_point, order):
    reference = ow_box_value(box, box_point, dps=30)
    quadric = quadratic_form_matrix(symanzik(box).xi).specialize(box_point.substitutions(box)).entries
    permuted = [[mp.mpf(quadric[i, j].p) / quadric[i, j].q for j in order] for i in order]
    evaluation = ow_quadric_value(permuted, dps=30)
    assert abs(evaluation.value - reference.value) < mp.mpf(10) ** -20 * abs(reference.value)


@pytest.mark.slow
def test_ow_box_matches_adaptive_quadrature(box, box_point, box_points):
    for p in [box_point, *box_points]:
        evaluation = ow_box_value(box, p, dps=30)
        quadrature = parametric_quadrature(build_integrand(box, 4), p, method="adaptive", epsrel=1e-8)
        assert quadrature.relative_error(float(evaluation.value)) <= 1e-6
