"""
Algebraic expressions over kinematic symbols with formal square roots.
"""

from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import sympy as sp

Operand = Union["SqrtExpr", sp.Expr, int]


class SqrtExpr:
    """
    A sympy expression plus named sub-expressions it refers to.

    Abbreviation symbols (for example the entries U_j_k of C⁻¹) stay
    symbolic in `expr`; `definitions` maps each to its value in kinematic
    symbols, and `resolved()` expands them.
    """

    __slots__ = ("expr", "definitions")

    def __init__(self, expr, definitions: Optional[Mapping[sp.Symbol, sp.Expr]] = None):
        if isinstance(expr, SqrtExpr):
            definitions = {**expr.definitions, **(definitions or {})}
            expr = expr.expr
        self.expr: sp.Expr = sp.sympify(expr)
        self.definitions: Dict[sp.Symbol, sp.Expr] = dict(definitions or {})

    @staticmethod
    def _lift(other: Operand) -> "SqrtExpr":
        return other if isinstance(other, SqrtExpr) else SqrtExpr(other)

    def _combine(self, other: Operand, expr: sp.Expr) -> "SqrtExpr":
        other = self._lift(other)
        return SqrtExpr(expr, {**self.definitions, **other.definitions})

    def __add__(self, other: Operand) -> "SqrtExpr":
        return self._combine(other, self.expr + self._lift(other).expr)

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "SqrtExpr":
        return self._combine(other, self.expr - self._lift(other).expr)

    def __rsub__(self, other: Operand) -> "SqrtExpr":
        return self._combine(other, self._lift(other).expr - self.expr)

    def __mul__(self, other: Operand) -> "SqrtExpr":
        return self._combine(other, self.expr * self._lift(other).expr)

    __rmul__ = __mul__

    def __neg__(self) -> "SqrtExpr":
        return SqrtExpr(-self.expr, self.definitions)

    def __truediv__(self, other: Operand) -> "SqrtExpr":
        other = self._lift(other)
        if other.is_syntactic_zero():
            raise ZeroDivisionError(f"division by the zero expression in ({self.expr})/({other.expr})")
        return self._combine(other, self.expr / other.expr)

    def __rtruediv__(self, other: Operand) -> "SqrtExpr":
        return self._lift(other) / self

    def __pow__(self, exponent: int) -> "SqrtExpr":
        if exponent < 0 and self.is_syntactic_zero():
            raise ZeroDivisionError("negative power of the zero expression")
        return SqrtExpr(self.expr**exponent, self.definitions)

    def sqrt(self) -> "SqrtExpr":
        return SqrtExpr(sp.sqrt(self.expr), self.definitions)

    def is_syntactic_zero(self) -> bool:
        return sp.expand(self.expr) == 0

    def resolved(self) -> sp.Expr:
        """The expression with every abbreviation replaced by its definition."""
        expr = self.expr
        for _ in range(len(self.definitions) + 1):
            replaced = expr.xreplace(self.definitions)
            if replaced == expr:
                break
            expr = replaced
        return expr

    def subs(self, values: Mapping[sp.Symbol, sp.Expr]) -> "SqrtExpr":
        """Exact specialization; abbreviations are resolved first."""
        return SqrtExpr(self.resolved().xreplace(dict(values)))

    def radicands(self) -> Tuple[sp.Expr, ...]:
        found = []
        for power in self.expr.atoms(sp.Pow):
            if power.exp.is_Rational and power.exp.q == 2 and power.base not in found:
                found.append(power.base)
        return tuple(found)

    def free_symbols(self) -> Iterable[sp.Symbol]:
        return self.resolved().free_symbols

    def to_prefix(self) -> str:
        """Canonical prefix serialization of the expression tree."""
        return sp.srepr(self.expr)

    def to_text(self) -> str:
        return sp.sstr(self.expr)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SqrtExpr):
            return self.expr == other.expr
        try:
            return self.expr == sp.sympify(other)
        except sp.SympifyError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.expr)

    def __repr__(self) -> str:
        return f"SqrtExpr({self.to_text()})"


def as_sqrt_expr(value: Operand) -> SqrtExpr:
    return value if isinstance(value, SqrtExpr) else SqrtExpr(value)


__all__ = ["SqrtExpr", "as_sqrt_expr"]
