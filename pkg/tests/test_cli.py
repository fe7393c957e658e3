import asyncio
import sys

import pytest
import sympy as sp
from pydantic import ValidationError

from cli import JobSpec, build_job, main_cli, parse_flags, run
from graphfile import InputError
from reporting import parse_structured

GRADED_FLAGS = ["n", "v", "format"]


def test_graded_report():
    result = run(JobSpec(command="graded", n=5))
    assert result.exit_code == 0
    assert result.report["dims"] == [1, 15, 15, 1]


def test_graded_report_beyond_the_reduction_limit():
    result = run(JobSpec(command="graded", n=8))
    assert result.exit_code == 0
    assert result.report["dims"] == [1, 36, 126, 48]


def test_triangle_variant_report():
    result = run(JobSpec(command="graded", n=3, vanishing=2))
    assert result.report["dims"] == [1, 3, 1]
    assert result.report["vanishing"] == 2


def test_structured_output_is_deterministic():
    job = JobSpec(command="graded", n=6, format="structured")
    first, second = run(job), run(job)
    assert first.output == second.output
    root, parsed = parse_structured(first.output)
    assert root == "report"
    assert parsed["dims"] == [1, 21, 35, 6]
    assert parsed["exit_code"] == 0


def test_symanzik_report_for_builtin():
    result = run(JobSpec(command="symanzik", graph="builtin:sunrise"))
    assert result.exit_code == 0
    assert result.report["loop_number"] == 2
    assert "psi:" in result.output


def test_symanzik_report_lists_display_aliases():
    result = run(JobSpec(command="symanzik", graph="builtin:box"))
    assert result.exit_code == 0
    report = result.report
    assert set(report["aliases"]) >= {"q1^2", "(q1+q2)^2"}
    substitutions = {sp.Symbol(name): expansion for name, expansion in report["aliases"].items()}
    assert sp.expand(report["phi_aliased"].xreplace(substitutions) - report["phi"]) == 0


def test_triangle_coaction_report():
    result = run(JobSpec(command="coaction", graph="builtin:triangle"))
    assert result.exit_code == 0
    assert result.report["term_count"] == 7


def test_unsupported_topology_is_an_input_error():
    result = run(JobSpec(command="coaction", graph="builtin:pentagon"))
    assert result.exit_code == 1
    assert result.report["error"]["type"] == "UnsupportedConfigurationError"


@pytest.mark.parametrize("graph", ["builtin:heptagon-x", "/nonexistent/graph.txt"])
def test_bad_graph_source(graph):
    result = run(JobSpec(command="symanzik", graph=graph))
    assert result.exit_code == 1
    assert result.report["error"]["type"] == "InputError"


def test_eval_bubble_against_closed_form():
    result = run(JobSpec(command="eval", graph="builtin:bubble", kinematics="uniform"))
    assert result.exit_code == 0
    assert result.report["closed_form"]["provenance"] == "bubble-d4"
    assert all(entry["within_tolerance"] for entry in result.report["agreement"])


def test_eval_reports_divergence():
    job = JobSpec(command="eval", graph="builtin:triangle-m1", kinematics="uniform", dimension=2)
    result = run(job)
    assert result.exit_code == 0
    assert "e1" in result.report["divergent"]
    assert "quadrature" not in result.report


def test_reduce_rejects_triangles():
    result = run(JobSpec(command="reduce", graph="builtin:triangle", kinematics="uniform"))
    assert result.exit_code == 1
    assert result.report["error"]["type"] == "ReductionError"


def test_parse_flags_forms():
    assert parse_flags(["--n=5", "--v", "1"], GRADED_FLAGS) == {"n": "5", "v": "1"}


@pytest.mark.parametrize(
    "args",
    [
        ["--size=5"],
        ["--n=5", "--n=6"],
        ["--n"],
        ["--n", "--v=1"],
        ["5"],
    ],
)
def test_parse_flags_errors(args):
    with pytest.raises(InputError):
        parse_flags(args, GRADED_FLAGS)


def test_build_job_routes_numeric_options():
    job = build_job("eval", {"graph": "builtin:box", "kinematics": "uniform", "precision": "40", "method": "mc"})
    assert job.options.precision == 40
    assert job.options.method == "mc"
    assert job.dimension == 4


def test_build_job_errors():
    with pytest.raises(InputError):
        build_job("graded", {"n": "five"})
    with pytest.raises(ValidationError):
        build_job("graded", {})
    with pytest.raises(ValidationError):
        build_job("eval", {"graph": "builtin:box"})
    with pytest.raises(ValidationError):
        build_job("graded", {"n": "4", "precision": "3"})


def test_main_cli_graded(monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["cli.py", "graded", "--n=4"])
    assert asyncio.run(main_cli()) == 0
    out = capsys.readouterr().out
    assert "dims:" in out
    assert "10" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["cli.py"], 0),
        (["cli.py", "graded", "--help"], 0),
        (["cli.py", "frobnicate"], 1),
        (["cli.py", "graded", "--graph=x"], 1),
        (["cli.py", "graded", "--n=2"], 1),
    ],
)
def test_main_cli_exit_codes(monkeypatch, argv, code):
    monkeypatch.setattr(sys, "argv", argv)
    assert asyncio.run(main_cli()) == code


def test_show_config_lists_builtin_graphs(monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["cli.py", "show-config"])
    assert asyncio.run(main_cli()) == 0
    out = capsys.readouterr().out
    assert "DEFAULT_PRECISION" in out
    assert "  - box" in out
