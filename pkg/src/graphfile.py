"""
Line-oriented graph and kinematics files.

    # comment
    graph box
    edge e1 v1 v2 mass=m1
    edge e2 v2 v3 mass=0
    leg q1 v1 momentum=q1

    set m1^2 = 1
    set s[1,2] = -1/7

Graph lines and `set` lines may share a file; each parser skips the other's
lines. Legs are numbered 1, 2, … in file order, which fixes the meaning of
s[i,j]. Values are exact integers or fractions p/q.
"""

import logging
import re
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from graphkin import ExternalLeg, FeynmanGraph, GraphError, InternalEdge, KinematicPoint

# Configure module-specific logger
logger = logging.getLogger(__name__)


class InputError(Exception):
    """Raised for malformed graph or kinematics input, with its position"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}")


_TOKEN = re.compile(r"\S+")
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_S_KEY = re.compile(r"^s\[(\d+),(\d+)\]$")
_MASS_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\^2$")
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

GRAPH_KEYWORDS = ("graph", "edge", "leg")


def _lines(text: str) -> Iterator[Tuple[int, List[Tuple[str, int]]]]:
    """Non-empty lines as (line number, [(token, 1-based column)])."""
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        tokens = [(match.group(0), match.start() + 1) for match in _TOKEN.finditer(line)]
        if tokens:
            yield number, tokens


def _identifier(token: Tuple[str, int], number: int, what: str) -> str:
    value, column = token
    if not _IDENTIFIER.match(value):
        raise InputError(f"invalid {what}: {value!r}", number, column)
    return value


def _option(token: Tuple[str, int], number: int, key: str) -> str:
    value, column = token
    prefix = f"{key}="
    if not value.startswith(prefix) or len(value) == len(prefix):
        raise InputError(f"expected {prefix}<value>, got {value!r}", number, column)
    return value[len(prefix) :]


def parse_graph_file(text: str) -> FeynmanGraph:
    """
    Parse the graph block of a file.

    Raises:
        InputError: On syntax errors and duplicate ids, with line and column
        GraphError: On structural errors such as a disconnected graph
    """
    name: Optional[str] = None
    header_line = 0
    vertices: List[str] = []
    edges: List[InternalEdge] = []
    legs: List[ExternalLeg] = []
    edge_lines: Dict[str, int] = {}
    leg_lines: Dict[str, int] = {}

    def vertex(v: str) -> str:
        if v not in vertices:
            vertices.append(v)
        return v

    for number, tokens in _lines(text):
        keyword, column = tokens[0]
        if keyword == "set":
            continue
        if keyword not in GRAPH_KEYWORDS:
            raise InputError(f"unknown keyword {keyword!r}", number, column)
        if keyword != "graph" and name is None:
            raise InputError("the file must start with 'graph <name>'", number, column)

        if keyword == "graph":
            if name is not None:
                raise InputError(f"second graph header, first at line {header_line}", number, column)
            if len(tokens) != 2:
                raise InputError("expected 'graph <name>'", number, column)
            name, header_line = tokens[1][0], number
        elif keyword == "edge":
            if len(tokens) != 5:
                raise InputError("expected 'edge <id> <v1> <v2> mass=<symbol|0>'", number, column)
            edge_id = _identifier(tokens[1], number, "edge id")
            if edge_id in edge_lines:
                raise InputError(
                    f"duplicate edge id {edge_id}, first defined at line {edge_lines[edge_id]}", number, tokens[1][1]
                )
            endpoints = (
                vertex(_identifier(tokens[2], number, "vertex")),
                vertex(_identifier(tokens[3], number, "vertex")),
            )
            mass = _option(tokens[4], number, "mass")
            if mass != "0" and not _IDENTIFIER.match(mass):
                raise InputError(f"invalid mass symbol {mass!r}", number, tokens[4][1])
            edges.append(InternalEdge(id=edge_id, endpoints=endpoints, mass=None if mass == "0" else mass))
            edge_lines[edge_id] = number
        else:
            if len(tokens) != 4:
                raise InputError("expected 'leg <id> <vertex> momentum=<symbol>'", number, column)
            leg_id = _identifier(tokens[1], number, "leg id")
            if leg_id in leg_lines:
                raise InputError(
                    f"duplicate leg id {leg_id}, first defined at line {leg_lines[leg_id]}", number, tokens[1][1]
                )
            momentum = _option(tokens[3], number, "momentum")
            legs.append(ExternalLeg(id=leg_id, vertex=vertex(_identifier(tokens[2], number, "vertex")), momentum=momentum))
            leg_lines[leg_id] = number

    if name is None:
        raise InputError("no 'graph <name>' header found")
    if not edges:
        raise InputError(f"graph {name} has no edges", header_line, 1)
    graph = FeynmanGraph(name=name, vertices=tuple(vertices), edges=tuple(edges), legs=tuple(legs))
    logger.debug(f"parsed graph {name}: {graph.edge_count} edges, {len(legs)} legs, loop number {graph.loop_number}")
    return graph


def _rational(token: Tuple[str, int], number: int) -> Fraction:
    value, column = token
    if not _RATIONAL.match(value):
        raise InputError(f"expected an exact rational such as -1/7, got {value!r}", number, column)
    try:
        return Fraction(value)
    except ZeroDivisionError:
        raise InputError(f"zero denominator in {value!r}", number, column)


def parse_kinematics_file(text: str, graph: FeynmanGraph) -> KinematicPoint:
    """
    Parse the `set` lines of a file into a point for `graph`.

    A squared mass applies to every edge carrying that mass symbol.

    Raises:
        InputError: On syntax errors, unknown symbols and repeated keys
    """
    s: Dict[Tuple[int, int], Fraction] = {}
    msq: Dict[str, Fraction] = {}
    seen: Dict[str, int] = {}
    masses = {edge.mass for edge in graph.massive_edges}
    leg_count = len(graph.legs)

    for number, tokens in _lines(text):
        keyword, column = tokens[0]
        if keyword in GRAPH_KEYWORDS:
            continue
        if keyword != "set":
            raise InputError(f"unknown keyword {keyword!r}", number, column)
        if len(tokens) != 4 or tokens[2][0] != "=":
            raise InputError("expected 'set <key> = <rational>'", number, column)
        key, key_column = tokens[1]
        if key in seen:
            raise InputError(f"{key} already set at line {seen[key]}", number, key_column)
        seen[key] = number
        value = _rational(tokens[3], number)

        s_match, mass_match = _S_KEY.match(key), _MASS_KEY.match(key)
        if s_match:
            i, j = int(s_match.group(1)), int(s_match.group(2))
            if not (1 <= i <= leg_count and 1 <= j <= leg_count):
                raise InputError(f"{key}: legs are numbered 1..{leg_count}", number, key_column)
            pair = (min(i, j), max(i, j))
            if pair in s:
                raise InputError(f"{key} repeats s[{pair[0]},{pair[1]}]", number, key_column)
            s[pair] = value
        elif mass_match:
            mass = mass_match.group(1)
            if mass not in masses:
                raise InputError(f"no edge of {graph.name} carries mass {mass}", number, key_column)
            if value < 0:
                raise InputError(f"{key} must be non-negative", number, tokens[3][1])
            for edge in graph.massive_edges:
                if edge.mass == mass:
                    msq[edge.id] = value
        else:
            raise InputError(f"unknown key {key!r}; expected s[i,j] or <mass>^2", number, key_column)

    return KinematicPoint(s=s, msq=msq)


__all__ = ["InputError", "parse_graph_file", "parse_kinematics_file", "GraphError"]
