import itertools

import pytest
import sympy as sp

import config
from coactionkit import a_jk_consistency
from common import _box_checks
from config.types import NumericOptions
from graphkin import KinematicPoint, cycle_graph, s_symbol
from griffiths import (
    GriffithsError,
    NotInJacobianIdealError,
    ReductionError,
    beta_numerators,
    box_face_coefficients,
    divergence,
    exterior_identity_holds,
    homogeneous_check,
    jacobian_decompose,
    picard_fuchs_B,
    reduce_to_boxes,
)
from griffiths import forms
from polyalg import KPoly, partial_derivative
from symanzik import symanzik


@pytest.fixture
def box_xi(box, box_point):
    return symanzik(box).xi.specialize(box_point.substitutions(box))


def test_decomposition_resubstitutes(box_xi):
    alphas = box_xi.alphas
    numerator = KPoly(alphas[0] * alphas[1] - 3 * alphas[2] ** 2, alphas)
    A = jacobian_decompose(numerator, box_xi)
    total = KPoly(0, alphas)
    for a_i, i in zip(A, range(4)):
        total = total + a_i * partial_derivative(box_xi, i)
    assert total == numerator
    assert all(a.is_homogeneous(1) for a in A)


def test_decomposition_of_zero(box_xi):
    A = jacobian_decompose(KPoly(0, box_xi.alphas), box_xi)
    assert all(a.is_zero() for a in A)


def test_constants_are_not_in_the_ideal(box_xi):
    with pytest.raises(NotInJacobianIdealError):
        jacobian_decompose(KPoly(1, box_xi.alphas), box_xi)


def test_inhomogeneous_numerator(box_xi):
    alphas = box_xi.alphas
    with pytest.raises(GriffithsError):
        jacobian_decompose(KPoly(alphas[0] ** 2 + alphas[1], alphas), box_xi)


def test_decomposition_is_stable_under_column_order(box_xi):
    alphas = box_xi.alphas
    numerator = KPoly(alphas[0] * alphas[3], alphas)
    first = jacobian_decompose(numerator, box_xi)
    second = jacobian_decompose(numerator, box_xi, column_order=list(reversed(range(16))))
    # kernel elements are divergence free, so B does not depend on the choice
    assert divergence(first) == divergence(second)


def test_exterior_identity_for_weight_zero_fields():
    alphas = sp.symbols("alpha_1:4")
    xi = KPoly(alphas[0] ** 2 + 2 * alphas[1] * alphas[2] + 3 * alphas[2] ** 2, alphas)
    # deg A − 1 + N = 2k
    A = [KPoly(alphas[1] ** 2, alphas), KPoly(-alphas[0] * alphas[2], alphas), KPoly(2 * alphas[0] ** 2, alphas)]
    assert exterior_identity_holds(A, xi, power=2)


def test_beta_numerators_are_antisymmetric_pairs():
    alphas = sp.symbols("alpha_1:4")
    A = [KPoly(1, alphas), KPoly(0, alphas), KPoly(0, alphas)]
    table = beta_numerators(A)
    assert set(table) == {(1, 2), (1, 3), (2, 3)}
    # (−1)^{x+y}(α_y A_x − α_x A_y) with A = (1, 0, 0)
    assert table[(1, 2)] == KPoly(-alphas[1], alphas)
    assert table[(1, 3)] == KPoly(alphas[2], alphas)
    assert table[(2, 3)].is_zero()


def test_forms_wedge_and_interior():
    alphas = sp.symbols("alpha_1:3")
    omega = forms.omega_form(alphas)
    assert omega == {(1,): alphas[0], (0,): -alphas[1]}
    # ι_E Ω = 0 for the Euler field
    assert forms.is_zero(forms.interior(list(alphas), omega))


def test_picard_fuchs_identity_is_exact(box, box_point):
    data = picard_fuchs_B(box, None, box_point)
    assert data.identity_exact
    assert data.param == s_symbol(1, 1)
    assert len(data.A) == 4
    assert all(a.total_degree() <= 1 for a in data.A)


def test_picard_fuchs_B_is_half_log_derivative_of_det(box, box_point):
    from polyalg import det_and_inverse, quadratic_form_matrix

    C = quadratic_form_matrix(symanzik(box).xi)
    param = s_symbol(1, 1)
    det = C.entries.det()
    expected = -sp.Rational(1, 2) * (sp.diff(det, param) / det).subs(box_point.substitutions(box))
    assert picard_fuchs_B(box, param, box_point).B == expected
    assert det_and_inverse(C, box_point.substitutions(box))[0] == det.subs(box_point.substitutions(box))


def test_homogeneous_relation_resolves_sign(box, box_points):
    for point in box_points:
        check = homogeneous_check(box, None, point, step=sp.Rational(1, 10**6))
        assert check.resolved_sign == "dh - B h = 0"
        assert check.residual_minus <= 1e-9


def test_face_coefficients_match_log_derivative_of_f(box, box_point, box_points):
    for point in [box_point, *box_points]:
        checks = a_jk_consistency(box, point)
        assert [check.pair for check in checks] == list(itertools.combinations(range(1, 5), 2))
        for check in checks:
            assert check.passed, check
            assert check.residual <= 1e-9 * max(abs(check.exact), abs(check.expected))
        assert any(check.exact != 0 for check in checks)


def test_face_coefficients_in_another_invariant(box, box_point):
    checks = a_jk_consistency(box, box_point, param=s_symbol(1, 2))
    assert all(check.passed for check in checks)


def test_face_coefficient_mismatch_fails(box, box_point, monkeypatch):
    monkeypatch.setattr(config.common, "BOX_NORMALIZATION", 1)
    checks = a_jk_consistency(box, box_point)
    assert not all(check.passed for check in checks)
    options = NumericOptions()
    face = next(entry for entry in _box_checks(box, box_point, options) if entry["name"] == "face-coefficients")
    assert not face["passed"]


def test_box_checks_include_dilog_weight_collapse(box, box_point):
    entries = {entry["name"]: entry for entry in _box_checks(box, box_point, NumericOptions())}
    assert {"prefactor-identity", "dilog-weight-collapse", "face-coefficients"} <= set(entries)
    assert entries["dilog-weight-collapse"]["passed"]
    assert entries["dilog-weight-collapse"]["residual"] == 0


def test_face_coefficients_cover_all_pairs(box, box_point):
    coefficients = box_face_coefficients(box, box_point)
    assert set(coefficients.a) == set(itertools.combinations(range(1, 5), 2))


def test_box_reduces_to_itself(box, box_point):
    result = reduce_to_boxes(box, box_point, check=False)
    assert result.coefficients == {frozenset(): 1}
    assert result.remainder == []


def test_reduction_needs_four_edges():
    g = cycle_graph(3)
    with pytest.raises(ReductionError):
        reduce_to_boxes(g, KinematicPoint.uniform(g), check=False)


def test_pentagon_coefficients_without_quadrature():
    g = cycle_graph(5)
    result = reduce_to_boxes(g, KinematicPoint.uniform(g), check=False)
    assert len(result.coefficients) == 5
    assert all(len(key) == 1 for key in result.coefficients)
    assert result.relative_residual is None


@pytest.mark.slow
def test_pentagon_reduction_residual():
    g = cycle_graph(5)
    result = reduce_to_boxes(g, KinematicPoint.uniform(g), check=True, method="mc", budget=10**6)
    assert result.relative_residual <= 1e-3


@pytest.mark.slow
def test_pentagon_reduction_residual_adaptive():
    g = cycle_graph(5)
    result = reduce_to_boxes(g, KinematicPoint.uniform(g), check=True, method="adaptive", epsrel=1e-8)
    assert result.relative_residual <= 1e-6


@pytest.mark.slow
def test_box_reduction_residual_adaptive(box, box_points):
    for point in box_points:
        result = reduce_to_boxes(box, point, check=True, method="adaptive", epsrel=1e-9)
        assert result.relative_residual <= 1e-6


def test_hexagon_keeps_a_remainder():
    g = cycle_graph(6)
    result = reduce_to_boxes(g, KinematicPoint.uniform(g), check=False)
    assert len(result.coefficients) == 15
    assert all(term.variables == 6 for term in result.remainder)
