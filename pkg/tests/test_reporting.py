from fractions import Fraction

import mpmath as mp
import pytest
import sympy as sp

from reporting import (
    AlgebraicValue,
    DecimalValue,
    ReportFormatError,
    parse_structured,
    render_structured,
    render_text,
)


def sample_report():
    x = sp.Symbol("s[1,2]")
    return {
        "command": "coaction",
        "passed": True,
        "count": 8,
        "coefficient": Fraction(-1, 7),
        "value": DecimalValue.from_mp(mp.mpf(1) / 3, 20),
        "phase": DecimalValue.from_mp(mp.mpc(1, -2), 10),
        "root": AlgebraicValue(expr=sp.sqrt(3) / 2),
        "phi": x**2 + sp.Rational(1, 3) * x,
        "terms": ["I^m (x) L^2", {"weight": [2, 2], "label": "face {e1,e2}"}],
        "empty": {},
    }


def test_structured_round_trip():
    report = sample_report()
    text = render_structured(report)
    root, parsed = parse_structured(text)
    assert root == "report"
    assert parsed == report


def test_structured_layout():
    text = render_structured({"count": 8, "terms": ["a"]})
    assert text.splitlines() == [
        "report: map",
        "  count = int 8",
        "  terms: list",
        '    #0 = str "a"',
    ]


def test_algebraic_values_carry_radicands():
    value = AlgebraicValue(expr=sp.sqrt(5) + sp.sqrt(2) / 3)
    assert value.radicands == (sp.Integer(2), sp.Integer(5))
    assert "radicands" in render_structured({"v": value})


def test_decimal_keeps_precision():
    value = DecimalValue.from_mp(mp.pi, 25)
    assert value.precision == 25
    assert value.real.startswith("3.14159265358979323846")
    with mp.workdps(25):
        assert abs(value.to_mp() - mp.pi) < mp.mpf(10) ** -23


def test_floats_are_rejected():
    with pytest.raises(ReportFormatError):
        render_structured({"value": 0.5})


@pytest.mark.parametrize(
    "text",
    [
        "",
        "report: map\n      deep = int 1\n",
        "report: map\n  x = int one\n",
        "report: map\n  x = color red\n",
        "report: list\n  #1 = int 0\n",
        "report: map\nother: map\n",
        "report map\n",
    ],
)
def test_malformed_structured_reports(text):
    with pytest.raises(ReportFormatError):
        parse_structured(text)


def test_render_text_nests_maps_and_lists():
    text = render_text({"graph": "box", "check": {"passed": False}, "dims": [1, 10, 5]})
    assert text.splitlines() == [
        "graph: box",
        "check:",
        "  passed: no",
        "dims:",
        "  1",
        "  10",
        "  5",
    ]
