from fractions import Fraction

import pytest

from graphfile import InputError, parse_graph_file, parse_kinematics_file
from graphkin import DisconnectedGraphError

TRIANGLE = """\
# massless edge e2
graph tri
edge e1 v2 v3 mass=m1
edge e2 v3 v1 mass=0
edge e3 v1 v2 mass=m3
leg q1 v1 momentum=q1
leg q2 v2 momentum=q2
leg q3 v3 momentum=q3

set m1^2 = 1
set m3^2 = 3/2
set s[1,1] = 2
set s[2,2] = 3
set s[3,3] = 5
set s[1,2] = -1/7
set s[1,3] = -1/7
set s[2,3] = -1/7
"""


def test_parse_graph_file():
    g = parse_graph_file(TRIANGLE)
    assert g.name == "tri"
    assert g.edge_ids == ("e1", "e2", "e3")
    assert g.edge("e2").mass is None
    assert g.vertices == ("v2", "v3", "v1")
    assert [leg.id for leg in g.legs] == ["q1", "q2", "q3"]


def test_parse_kinematics_from_the_same_file():
    g = parse_graph_file(TRIANGLE)
    p = parse_kinematics_file(TRIANGLE, g)
    assert p.msq == {"e1": Fraction(1), "e3": Fraction(3, 2)}
    assert p.s_value(2, 1) == Fraction(-1, 7)
    assert p.s_value(3, 3) == 5


def test_shared_mass_symbol_sets_every_edge():
    text = "graph b\nedge e1 v1 v2 mass=m\nedge e2 v2 v1 mass=m\nleg q1 v1 momentum=q1\nleg q2 v2 momentum=q2\n"
    g = parse_graph_file(text)
    p = parse_kinematics_file("set m^2 = 4", g)
    assert p.msq == {"e1": 4, "e2": 4}


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("edge e1 v1 v2 mass=m1\n", 1, 1),
        ("graph g\nvertex v1\n", 2, 1),
        ("graph g\nedge e1 v1 v2 m1\n", 2, 15),
        ("graph g\nedge e1 v1 v2\n", 2, 1),
        ("graph g\nedge 1e v1 v2 mass=0\n", 2, 6),
        ("graph g\nedge e1 v1 v2 mass=0\n  edge e1 v2 v1 mass=0\n", 3, 8),
        ("graph g\ngraph h\n", 2, 1),
    ],
)
def test_graph_errors_carry_position(text, line, column):
    with pytest.raises(InputError) as excinfo:
        parse_graph_file(text)
    assert (excinfo.value.line, excinfo.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(excinfo.value)


def test_duplicate_edge_names_first_definition():
    with pytest.raises(InputError, match="first defined at line 2"):
        parse_graph_file("graph g\nedge e1 v1 v2 mass=0\nedge e1 v2 v1 mass=0\n")


def test_empty_graph():
    with pytest.raises(InputError):
        parse_graph_file("# nothing\n")
    with pytest.raises(InputError):
        parse_graph_file("graph g\n")


def test_structural_errors_come_from_the_graph():
    text = "graph g\nedge e1 v1 v2 mass=0\nedge e2 v3 v4 mass=0\n"
    with pytest.raises(DisconnectedGraphError):
        parse_graph_file(text)


@pytest.mark.parametrize(
    "text, message",
    [
        ("set s[1,1] = 0.5", "exact rational"),
        ("set s[1,1] = 1/0", "zero denominator"),
        ("set s[1,4] = 1", "legs are numbered"),
        ("set s[1,2] = 1\nset s[2,1] = 1", "repeats"),
        ("set s[1,1] = 1\nset s[1,1] = 2", "already set"),
        ("set m2^2 = 1", "carries mass"),
        ("set m1^2 = -1", "non-negative"),
        ("set t = 1", "unknown key"),
        ("set s[1,1] 1", "expected 'set"),
        ("let s[1,1] = 1", "unknown keyword"),
    ],
)
def test_kinematics_errors(text, message):
    g = parse_graph_file(TRIANGLE)
    with pytest.raises(InputError, match=message):
        parse_kinematics_file(text, g)
