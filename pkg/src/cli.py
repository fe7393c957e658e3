import asyncio
import logging
import sys
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

import config
from coactionkit import CoactionError
from common import (
    coaction_report,
    eval_report,
    graded_report,
    load_graph,
    load_point,
    logger,
    reduce_report,
    relation_set_report,
    relations_report,
    require_point,
    symanzik_report,
    verify_report,
)
from config.types import NumericOptions
from graphfile import InputError
from graphkin import GraphError
from griffiths import GriffithsError
from logging_handlers import remove_diagnostics_logger, setup_diagnostics_logger
from numeval import NumevalError
from polyalg import PolyError
from relations import BasisSizeMismatchError, RelationError
from reporting import render_structured, render_text
from symanzik import UnsupportedDimensionError

Command = Literal["symanzik", "coaction", "eval", "verify", "reduce", "relations", "graded"]


class VerificationFailure(Exception):
    """Raised when a verification check fails beyond its tolerance"""

    def __init__(self, checks: List[Dict[str, Any]]):
        self.checks = checks
        names = ", ".join(f"{c['name']} ({c['provenance']})" for c in checks)
        super().__init__(f"failed checks: {names}")


class JobSpec(BaseModel):
    """One CLI invocation: the command, its inputs and numeric options."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    graph: Optional[str] = Field(default=None, description="Graph file path or builtin:<name>")
    kinematics: Optional[str] = Field(default=None, description="Kinematics file path or 'uniform'")
    options: NumericOptions = Field(default_factory=NumericOptions)
    dimension: Literal[2, 4] = 4
    format: Literal["text", "structured"] = "text"
    n: Optional[int] = None
    vanishing: Optional[int] = None
    family: Optional[Literal["triangle-faces", "box-dilogs"]] = None

    @model_validator(mode="after")
    def _required_inputs(self) -> "JobSpec":
        if self.command in ("symanzik", "coaction", "eval", "verify", "reduce") and self.graph is None:
            raise ValueError(f"{self.command} needs --graph")
        if self.command in ("eval", "reduce") and self.kinematics is None:
            raise ValueError(f"{self.command} needs --kinematics")
        if self.command == "graded" and self.n is None:
            raise ValueError("graded needs --n")
        if self.command == "relations" and self.family is None:
            raise ValueError("relations needs --family")
        return self


class RunResult(BaseModel):
    exit_code: int
    report: Dict[str, Any]
    output: str


def _dispatch(job: JobSpec) -> Dict[str, Any]:
    if job.command == "graded":
        return graded_report(job.n, job.vanishing)
    g = load_graph(job.graph) if job.graph is not None else None
    p = load_point(job.kinematics, g) if g is not None else None
    if job.command == "relations":
        return relations_report(job.family, g, job.options)
    if job.command == "symanzik":
        return symanzik_report(g)
    if job.command == "coaction":
        return coaction_report(g, p)
    if job.command == "eval":
        return eval_report(g, require_point(p, "eval"), job.options, job.dimension)
    if job.command == "verify":
        return verify_report(g, p, job.options)
    return reduce_report(g, require_point(p, "reduce"), job.options)


def run(job: JobSpec) -> RunResult:
    """
    Run one job and render its report.

    Exit codes: 0 on success, 1 on input errors and unsupported
    configurations, 2 when a verification check fails or relations cannot
    be established.
    """
    handler = setup_diagnostics_logger(logging.WARNING)
    report: Dict[str, Any] = {"command": job.command}
    logger.info(f"Running {job.command}")
    try:
        report.update(_dispatch(job))
        failed = [c for c in report.get("checks", []) if not c["passed"]]
        if failed:
            raise VerificationFailure(failed)
        exit_code = 0
    except VerificationFailure as e:
        logger.error(str(e))
        report["failed"] = [f"{c['name']}: {c['provenance']}" for c in e.checks]
        exit_code = 2
    except RelationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        if isinstance(e, BasisSizeMismatchError):
            report["motivic_lattice"] = relation_set_report(e.motivic)
            report["derham_lattice"] = relation_set_report(e.derham)
        exit_code = 2
    except (
        InputError,
        GraphError,
        ValidationError,
        CoactionError,
        GriffithsError,
        NumevalError,
        PolyError,
        UnsupportedDimensionError,
    ) as e:
        logger.error(f"{type(e).__name__}: {e}")
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        exit_code = 1
    finally:
        remove_diagnostics_logger(handler)

    report["diagnostics"] = list(handler.records)
    report["exit_code"] = exit_code
    if job.format == "structured":
        output = render_structured(report)
    else:
        output = render_text(report)
    logger.info(f"{job.command} finished with exit code {exit_code}")
    return RunResult(exit_code=exit_code, report=report, output=output)


# flag -> (field, converter, stored on NumericOptions)
_FLAGS: Dict[str, Tuple[str, Callable[[str], Any], bool]] = {
    "graph": ("graph", str, False),
    "kinematics": ("kinematics", str, False),
    "format": ("format", str, False),
    "family": ("family", str, False),
    "dimension": ("dimension", int, False),
    "n": ("n", int, False),
    "v": ("vanishing", int, False),
    "precision": ("precision", int, True),
    "method": ("method", str, True),
    "budget": ("budget", int, True),
    "seed": ("seed", int, True),
    "tolerance": ("tolerance", float, True),
    "max-coeff": ("max_coeff", int, True),
    "held-out": ("held_out", int, True),
}


def parse_flags(args: List[str], allowed: List[str]) -> Dict[str, str]:
    """
    Read `--key=value` or `--key value` pairs.

    Raises:
        InputError: For unknown flags, repeats and missing values
    """
    flags: Dict[str, str] = {}
    i = 0
    while i < len(args):
        arg = args[i]
        if not arg.startswith("--"):
            raise InputError(f"unexpected argument {arg!r}")
        key, sep, value = arg[2:].partition("=")
        if not sep:
            if i + 1 >= len(args) or args[i + 1].startswith("--"):
                raise InputError(f"--{key} needs a value")
            value = args[i + 1]
            i += 1
        if key not in allowed:
            raise InputError(f"unknown flag --{key}; accepted: {', '.join('--' + a for a in allowed)}")
        if key in flags:
            raise InputError(f"--{key} given twice")
        flags[key] = value
        i += 1
    return flags


def build_job(command: str, flags: Dict[str, str]) -> JobSpec:
    """
    Raises:
        InputError: For values that do not convert
        ValidationError: For values outside their allowed range
    """
    fields: Dict[str, Any] = {"command": command}
    options: Dict[str, Any] = {}
    for key, raw in flags.items():
        name, convert, numeric = _FLAGS[key]
        try:
            value = convert(raw)
        except ValueError:
            raise InputError(f"invalid value for --{key}: {raw!r}")
        (options if numeric else fields)[name] = value
    return JobSpec(**fields, options=NumericOptions(**options))


_COMMON_OPTIONS = [
    "  --format=text|structured  Output format (default: text)",
    "  --precision=N             Decimal digits (default: 30)",
    "  --seed=N                  Random seed (default: 12345)",
]


async def _execute(command: str, args: List[str], allowed: List[str], usage: List[str]) -> int:
    if args and args[0] in ["-h", "--help"]:
        for line in usage:
            print(line)
        return 0
    try:
        job = build_job(command, parse_flags(args, allowed))
    except (InputError, ValidationError) as e:
        print(f"Error: {e}")
        print(f"Run '{command} --help' for the accepted options")
        return 1

    # Numeric work runs off the event loop
    result = await asyncio.to_thread(run, job)
    print(result.output, end="" if result.output.endswith("\n") else "\n")
    return result.exit_code


async def cmd_symanzik(args):
    """
    Print Ψ, Φ and Ξ of a graph.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: symanzik --graph=FILE|builtin:NAME [options]",
        "\nOptions:",
        "  --graph=FILE              Graph file or builtin:<name>",
        _COMMON_OPTIONS[0],
        "\nExamples:",
        "  symanzik --graph=builtin:box",
        "  symanzik --graph=sunrise.graph --format=structured",
    ]
    return await _execute("symanzik", args, ["graph", "format"], usage)


async def cmd_coaction(args):
    """
    Print the coaction of a box or triangle, or the period of a bubble.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: coaction --graph=FILE|builtin:NAME [--kinematics=FILE] [options]",
        "\nOptions:",
        "  --graph=FILE              Graph file or builtin:<name>",
        "  --kinematics=FILE         Specialize prefactors and arguments at a point",
        _COMMON_OPTIONS[0],
        "\nExamples:",
        "  coaction --graph=builtin:box",
        "  coaction --graph=builtin:triangle-m1 --format=structured",
    ]
    return await _execute("coaction", args, ["graph", "kinematics", "format"], usage)


async def cmd_eval(args):
    """
    Evaluate a parametric integral by quadrature and, where known, in closed form.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: eval --graph=FILE --kinematics=FILE|uniform [options]",
        "\nOptions:",
        "  --graph=FILE              Graph file or builtin:<name>",
        "  --kinematics=FILE         Kinematics file, or 'uniform'",
        "  --method=auto|adaptive|mc|both  Quadrature method (default: auto)",
        "  --budget=N                Subdivisions (adaptive) or samples (mc)",
        "  --dimension=2|4           Space-time dimension (default: 4)",
        "  --tolerance=X             Relative agreement with the closed form (default: 1e-6)",
        *_COMMON_OPTIONS,
        "\nExamples:",
        "  eval --graph=builtin:box --kinematics=uniform --method=both",
        "  eval --graph=builtin:bubble --kinematics=bubble.kin --dimension=2",
    ]
    allowed = ["graph", "kinematics", "method", "budget", "dimension", "tolerance", "format", "precision", "seed"]
    return await _execute("eval", args, allowed, usage)


async def cmd_verify(args):
    """
    Run the identity checks that apply to a graph; exit code 2 on a failure.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: verify --graph=FILE [--kinematics=FILE|uniform] [options]",
        "\nDescription:",
        "  Boxes: face prefactors, face coefficients, Picard-Fuchs identity and equation.",
        "  Triangles with massless edges: blow-up charts; massless triangles also",
        "  compare intersection points with the closed expressions.",
        "\nOptions:",
        "  --graph=FILE              Graph file or builtin:<name>",
        "  --kinematics=FILE         Kinematics file, or 'uniform'",
        _COMMON_OPTIONS[0],
        _COMMON_OPTIONS[1],
        "\nExamples:",
        "  verify --graph=builtin:box --kinematics=box.kin",
        "  verify --graph=builtin:triangle-m1",
    ]
    return await _execute("verify", args, ["graph", "kinematics", "format", "precision"], usage)


async def cmd_reduce(args):
    """
    Reduce a one-loop graph with up to six edges to boxes.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: reduce --graph=FILE --kinematics=FILE|uniform [options]",
        "\nOptions:",
        "  --graph=FILE              Graph file or builtin:<name>",
        "  --kinematics=FILE         Kinematics file, or 'uniform'",
        "  --method=auto|adaptive|mc Quadrature method of the residual check (default: auto)",
        "  --budget=N                Quadrature budget",
        _COMMON_OPTIONS[0],
        _COMMON_OPTIONS[2],
        "\nExamples:",
        "  reduce --graph=builtin:pentagon --kinematics=pentagon.kin",
    ]
    allowed = ["graph", "kinematics", "method", "budget", "format", "seed"]
    return await _execute("reduce", args, allowed, usage)


async def cmd_relations(args):
    """
    Find integer relations among the logarithms of a family.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: relations --family=triangle-faces|box-dilogs [--graph=FILE] [options]",
        "\nOptions:",
        "  --family=NAME             triangle-faces or box-dilogs",
        "  --graph=FILE              Graph file or builtin:<name> (default: the built-in triangle or box)",
        "  --precision=N             Working digits (default: 60, raised on demand)",
        "  --max-coeff=N             Largest relation coefficient (default: 10000)",
        "  --held-out=N              Held-out confirmation points (default: 10)",
        _COMMON_OPTIONS[0],
        _COMMON_OPTIONS[2],
        "\nExamples:",
        "  relations --family=triangle-faces",
        "  relations --family=box-dilogs --format=structured",
    ]
    allowed = ["family", "graph", "precision", "max-coeff", "held-out", "format", "seed"]
    return await _execute("relations", args, allowed, usage)


async def cmd_graded(args):
    """
    Print the weight-graded dimensions of a one-loop graph with n edges.

    Args:
        args: Command-line arguments after the subcommand
    """
    usage = [
        "Usage: graded --n=N [--v=V] [options]",
        "\nOptions:",
        "  --n=N                     Number of edges, at least 3",
        "  --v=V                     Vanishing masses (triangle only)",
        _COMMON_OPTIONS[0],
        "\nExamples:",
        "  graded --n=5",
        "  graded --n=3 --v=2",
    ]
    return await _execute("graded", args, ["n", "v", "format"], usage)


async def cmd_show_config(args):
    """
    Display the numeric defaults and the built-in graphs.

    Args:
        args: Command-line arguments after the subcommand
    """
    if args and args[0] in ["-h", "--help"]:
        print("Usage: show-config")
        print("\nDescription:")
        print("  Display the numeric defaults that flags override, and the built-in graph names.")
        return 0

    print("Current Configuration Settings:")
    print("==============================")

    print("\nPrecision:")
    print(f"  DEFAULT_PRECISION: {config.common.DEFAULT_PRECISION}")
    print(f"  RELATION_PRECISION: {config.common.RELATION_PRECISION}")
    print(f"  MAX_PRECISION: {config.common.MAX_PRECISION}")

    print("\nQuadrature:")
    print(f"  ADAPTIVE_TOLERANCE: {config.common.ADAPTIVE_TOLERANCE}")
    print(f"  MC_SAMPLES: {config.common.MC_SAMPLES}")
    print(f"  MC_ITERATIONS: {config.common.MC_ITERATIONS}")
    print(f"  DEFAULT_SEED: {config.common.DEFAULT_SEED}")

    print("\nRelations:")
    print(f"  MAX_COEFF: {config.common.MAX_COEFF}")
    print(f"  HELD_OUT_POINTS: {config.common.HELD_OUT_POINTS}")

    print("\nBuilt-in graphs (use --graph=builtin:<name>):")
    for name in config.graphs.names():
        print(f"  - {name}")
    print("  - cycle<N>")
    return 0


async def main_cli() -> int:
    """Command-line interface for one-loop parametric integrals and coactions."""
    # List of available commands
    commands = {
        "symanzik": cmd_symanzik,
        "coaction": cmd_coaction,
        "eval": cmd_eval,
        "verify": cmd_verify,
        "reduce": cmd_reduce,
        "relations": cmd_relations,
        "graded": cmd_graded,
        "show-config": cmd_show_config,
    }

    # No arguments or help flag
    if len(sys.argv) < 2 or sys.argv[1] in ["-h", "--help"]:
        print("One-loop coaction CLI")
        print("\nUsage: python cli.py <command> [options]")
        print("\nAvailable commands:")
        print("  symanzik     Print the Symanzik polynomials of a graph")
        print("  coaction     Print the coaction of a box, triangle or bubble")
        print("  eval         Evaluate a parametric integral")
        print("  verify       Run the identity checks for a graph")
        print("  reduce       Reduce a graph to boxes")
        print("  relations    Find integer relations among logarithms")
        print("  graded       Print weight-graded dimensions")
        print("  show-config  Display numeric defaults and built-in graphs")
        print("\nFor help on a specific command, run:")
        print("  python cli.py <command> --help")
        return 0

    # Get the command
    command = sys.argv[1]

    # Remove the command from arguments
    command_args = sys.argv[2:]

    if command not in commands:
        print(f"Unknown command: {command}")
        print("Available commands: " + ", ".join(commands.keys()))
        return 1
    return await commands[command](command_args)


if __name__ == "__main__":
    sys.exit(asyncio.run(main_cli()))
