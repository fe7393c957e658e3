from fractions import Fraction

import pytest
import sympy as sp
from pydantic import ValidationError

from graphkin import (
    ContractionError,
    DisconnectedGraphError,
    FeynmanGraph,
    GraphError,
    InternalEdge,
    KinematicPoint,
    MissingInvariantError,
    NotOneLoopError,
    UnknownEdgeError,
    contract,
    cycle_graph,
    invariant_expr,
    is_mass_momentum_spanning,
    motic_subgraphs,
    require_one_loop,
    s_symbol,
    sunrise_graph,
    triangle_graph,
    validate_generic,
)


def test_cycle_graph_layout():
    g = cycle_graph(4)
    assert g.edge_ids == ("e1", "e2", "e3", "e4")
    assert g.edge("e4").endpoints == ("v4", "v1")
    assert g.loop_number == 1
    assert g.is_one_loop_cycle
    assert g.leg_numbers_at("v3") == (3,)
    assert g.mass_symbol("e2") == sp.Symbol("m2^2")


def test_massless_edges_have_no_mass_symbol():
    g = cycle_graph(2, masses=[None, "m2"])
    assert g.mass_symbol("e1") is None
    assert [edge.id for edge in g.massive_edges] == ["e2"]


def test_sunrise_is_two_loop():
    g = sunrise_graph()
    assert g.loop_number == 2
    assert not g.is_one_loop_cycle
    with pytest.raises(NotOneLoopError):
        require_one_loop(g)


def test_duplicate_edge_id():
    edges = (
        InternalEdge(id="e1", endpoints=("v1", "v2")),
        InternalEdge(id="e1", endpoints=("v2", "v1")),
    )
    with pytest.raises(GraphError, match="e1"):
        FeynmanGraph(vertices=("v1", "v2"), edges=edges)


def test_disconnected_graph():
    edges = (InternalEdge(id="e1", endpoints=("v1", "v2")),)
    with pytest.raises(DisconnectedGraphError):
        FeynmanGraph(vertices=("v1", "v2", "v3"), edges=edges)


def test_unknown_vertex():
    edges = (InternalEdge(id="e1", endpoints=("v1", "v9")),)
    with pytest.raises(GraphError):
        FeynmanGraph(vertices=("v1",), edges=edges)


def test_contract_merges_into_earliest_vertex():
    g = contract(cycle_graph(4), ["e1"])
    assert g.vertices == ("v1", "v3", "v4")
    assert g.edge("e2").endpoints == ("v1", "v3")
    assert g.leg_numbers_at("v1") == (1, 2)
    assert g.name == "cycle4/e1"


def test_contract_errors():
    g = cycle_graph(3)
    with pytest.raises(UnknownEdgeError):
        contract(g, ["e9"])
    with pytest.raises(ContractionError):
        contract(g, ["e1", "e2", "e3"])


def test_contract_nothing_returns_graph():
    g = cycle_graph(3)
    assert contract(g, []) is g


def test_invariant_expr_expands_square():
    assert invariant_expr([2, 1]) == s_symbol(1, 1) + s_symbol(2, 2) + 2 * s_symbol(1, 2)
    assert s_symbol(3, 1) == sp.Symbol("s[1,3]")


def test_massive_cycle_has_no_proper_motic_subgraphs():
    assert motic_subgraphs(cycle_graph(4)) == []


def test_massless_triangle_paths_are_motic():
    g = triangle_graph([None, None, None])
    found = motic_subgraphs(g)
    assert sorted(sorted(m.edge_subset) for m in found) == [["e1", "e2"], ["e1", "e3"], ["e2", "e3"]]
    assert all(m.is_mass_momentum_spanning and m.loop_number == 0 for m in found)


def test_mass_momentum_spanning_needs_massive_edges():
    g = triangle_graph(["m1", None, None])
    assert not is_mass_momentum_spanning(g, frozenset({"e2", "e3"}))
    assert is_mass_momentum_spanning(g, frozenset({"e1", "e2"}))


def test_kinematic_point_normalizes_keys():
    p = KinematicPoint(s={(2, 1): Fraction(-1, 7), (1, 1): 1, (2, 2): 1}, msq={"e1": 2})
    assert p.s_value(1, 2) == Fraction(-1, 7)
    assert p.s_invariant([1, 2]) == Fraction(12, 7)


def test_kinematic_point_rejects_floats_and_negative_masses():
    with pytest.raises(ValidationError):
        KinematicPoint(s={(1, 1): 0.5})
    with pytest.raises(ValidationError):
        KinematicPoint(msq={"e1": -1})


def test_missing_invariant():
    p = KinematicPoint(s={(1, 1): 1})
    with pytest.raises(MissingInvariantError):
        p.s_value(1, 2)


def test_substitutions_share_mass_symbols():
    g = cycle_graph(2, masses=["m", "m"])
    p = KinematicPoint.uniform(g, msq=3)
    assert p.substitutions(g)[sp.Symbol("m^2")] == 3
    bad = KinematicPoint(s=p.s, msq={"e1": 1, "e2": 2})
    with pytest.raises(GraphError):
        bad.substitutions(g)


def test_perturbed_shifts_one_invariant():
    g = cycle_graph(3)
    p = KinematicPoint.uniform(g)
    q = p.perturbed({(2, 1): Fraction(1, 100)})
    assert q.s_value(1, 2) == Fraction(-1, 7) + Fraction(1, 100)
    assert q.s_value(1, 3) == p.s_value(1, 3)


def test_uniform_box_point_is_generic_and_euclidean():
    g = cycle_graph(4)
    report = validate_generic(g, KinematicPoint.uniform(g))
    assert report.passed
    assert report.euclidean
    assert report.violations == []


def test_genericity_violation_is_named():
    g = cycle_graph(3)
    p = KinematicPoint.uniform(g)
    s = dict(p.s)
    s[(1, 1)] = Fraction(0)
    report = validate_generic(g, KinematicPoint(s=s, msq=p.msq))
    assert not report.passed
    assert not report.euclidean
    assert "s_{1} + m_0^2 = 0" in report.violations
