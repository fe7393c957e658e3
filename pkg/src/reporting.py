"""
Text and structured rendering of command reports.

The structured form is one entry per line, indented two spaces per level:

    key: map
      count = int 8
      value = decimal 30 0.123...
      coefficient = rational -1/7
      root = algebraic "Pow(Integer(3), Rational(1, 2))" radicands "(Integer(3),)"
      terms: list
        #0 = str "I^m (x) L^2"

Strings and sympy trees are JSON-quoted; sympy trees use their canonical
prefix form, so parsing reproduces every value exactly.
"""

import json
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import mpmath as mp
import sympy as sp
from pydantic import BaseModel, ConfigDict

INDENT = "  "


class ReportFormatError(Exception):
    """Raised when a structured report cannot be parsed"""

    pass


class DecimalValue(BaseModel):
    """A real or complex decimal with the precision it was computed at."""

    model_config = ConfigDict(frozen=True)

    precision: int
    real: str
    imag: Optional[str] = None

    @classmethod
    def from_mp(cls, value, precision: int) -> "DecimalValue":
        with mp.workdps(precision):
            value = mp.mpmathify(value)
            if isinstance(value, mp.mpc):
                imag = None if value.imag == 0 else mp.nstr(value.imag, precision)
                return cls(precision=precision, real=mp.nstr(value.real, precision), imag=imag)
            return cls(precision=precision, real=mp.nstr(value, precision))

    def to_mp(self):
        with mp.workdps(self.precision):
            if self.imag is None:
                return mp.mpf(self.real)
            return mp.mpc(self.real, self.imag)

    def __str__(self) -> str:
        return self.real if self.imag is None else f"{self.real} + {self.imag}i"


class AlgebraicValue(BaseModel):
    """An exact number with square roots, stored with its radicands."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    expr: sp.Expr

    @property
    def radicands(self) -> Tuple[sp.Expr, ...]:
        found: List[sp.Expr] = []
        for power in self.expr.atoms(sp.Pow):
            if power.exp.is_Rational and power.exp.q == 2 and power.base not in found:
                found.append(power.base)
        return tuple(sorted(found, key=sp.default_sort_key))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AlgebraicValue) and self.expr == other.expr

    def __hash__(self) -> int:
        return hash(self.expr)

    def __str__(self) -> str:
        return sp.sstr(self.expr)


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return f"bool {'true' if value else 'false'}"
    if isinstance(value, int):
        return f"int {value}"
    if isinstance(value, str):
        return f"str {json.dumps(value, ensure_ascii=False)}"
    if isinstance(value, Fraction):
        return f"rational {value.numerator}/{value.denominator}"
    if isinstance(value, sp.Rational):
        return f"rational {value.p}/{value.q}"
    if isinstance(value, DecimalValue):
        text = f"decimal {value.precision} {value.real}"
        return text if value.imag is None else f"{text} {value.imag}i"
    if isinstance(value, AlgebraicValue):
        return (
            f"algebraic {json.dumps(sp.srepr(value.expr))} "
            f"radicands {json.dumps(sp.srepr(value.radicands))}"
        )
    if isinstance(value, sp.Basic):
        return f"expr {json.dumps(sp.srepr(value))}"
    if isinstance(value, float):
        raise ReportFormatError("floats must be wrapped in DecimalValue to keep their precision")
    raise ReportFormatError(f"no structured tag for {type(value).__name__}")


def _render(data: Any, key: str, depth: int, lines: List[str]) -> None:
    pad = INDENT * depth
    if isinstance(data, dict):
        lines.append(f"{pad}{key}: map")
        for child_key, child in data.items():
            _render(child, str(child_key), depth + 1, lines)
    elif isinstance(data, (list, tuple)):
        lines.append(f"{pad}{key}: list")
        for i, child in enumerate(data):
            _render(child, f"#{i}", depth + 1, lines)
    else:
        lines.append(f"{pad}{key} = {_scalar(data)}")


def render_structured(report: Dict[str, Any], root: str = "report") -> str:
    """Serialize a nested report of dicts, lists and tagged scalars."""
    lines: List[str] = []
    _render(report, root, 0, lines)
    return "\n".join(lines) + "\n"


_ENTRY = re.compile(r"^(?P<pad>(?:  )*)(?P<key>[^:=\s][^:=]*?)(?:(?P<container>: (?:map|list))|(?: = (?P<tag>\w+) (?P<payload>.*)))$")


def _parse_scalar(tag: str, payload: str, number: int) -> Any:
    try:
        if tag == "bool":
            if payload not in ("true", "false"):
                raise ValueError(payload)
            return payload == "true"
        if tag == "int":
            return int(payload)
        if tag == "str":
            return json.loads(payload)
        if tag == "rational":
            return Fraction(payload)
        if tag == "decimal":
            parts = payload.split(" ")
            imag = parts[2][:-1] if len(parts) == 3 else None
            return DecimalValue(precision=int(parts[0]), real=parts[1], imag=imag)
        if tag == "algebraic":
            decoder = json.JSONDecoder()
            expr_text, _ = decoder.raw_decode(payload)
            return AlgebraicValue(expr=sp.sympify(expr_text))
        if tag == "expr":
            return sp.sympify(json.loads(payload))
    except (ValueError, IndexError, sp.SympifyError) as e:
        raise ReportFormatError(f"line {number}: bad {tag} value: {e}")
    raise ReportFormatError(f"line {number}: unknown tag {tag!r}")


def parse_structured(text: str) -> Tuple[str, Any]:
    """
    Parse a structured report.

    Returns:
        (root key, value)

    Raises:
        ReportFormatError: On malformed lines or inconsistent indentation
    """
    root: List[Tuple[str, Any]] = []
    # stack of (depth, container)
    stack: List[Tuple[int, Any]] = []

    def attach(depth: int, key: str, value: Any, number: int) -> None:
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if depth == 0:
            if root:
                raise ReportFormatError(f"line {number}: second root entry")
            root.append((key, value))
            return
        if not stack or stack[-1][0] != depth - 1:
            raise ReportFormatError(f"line {number}: unexpected indentation")
        parent = stack[-1][1]
        if isinstance(parent, list):
            if key != f"#{len(parent)}":
                raise ReportFormatError(f"line {number}: expected list index #{len(parent)}, got {key}")
            parent.append(value)
        else:
            parent[key] = value

    for number, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        match = _ENTRY.match(line)
        if match is None:
            raise ReportFormatError(f"line {number}: cannot parse {line!r}")
        depth = len(match.group("pad")) // len(INDENT)
        key = match.group("key")
        if match.group("container"):
            container: Any = {} if match.group("container").endswith("map") else []
            attach(depth, key, container, number)
            stack.append((depth, container))
        else:
            attach(depth, key, _parse_scalar(match.group("tag"), match.group("payload"), number), number)

    if not root:
        raise ReportFormatError("empty report")
    return root[0]


def _text(value: Any) -> str:
    if isinstance(value, sp.Basic):
        return sp.sstr(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def render_text(report: Dict[str, Any], depth: int = 0) -> str:
    """Human-readable rendering: nested keys indented, scalars inline."""
    lines: List[str] = []
    pad = INDENT * depth
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(value, depth + 1))
        elif isinstance(value, (list, tuple)) and any(isinstance(v, (dict, list, tuple)) for v in value):
            lines.append(f"{pad}{key}:")
            for i, item in enumerate(value):
                if isinstance(item, dict):
                    lines.append(f"{pad}{INDENT}[{i}]")
                    lines.append(render_text(item, depth + 2))
                else:
                    lines.append(f"{pad}{INDENT}[{i}] {_text(item)}")
        elif isinstance(value, (list, tuple)):
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}{INDENT}{_text(item)}" for item in value)
        else:
            lines.append(f"{pad}{key}: {_text(value)}")
    return "\n".join(line for line in lines if line)


__all__ = [
    "ReportFormatError",
    "DecimalValue",
    "AlgebraicValue",
    "render_structured",
    "parse_structured",
    "render_text",
]
