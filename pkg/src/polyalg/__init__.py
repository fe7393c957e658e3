"""
Exact polynomial and linear algebra over the rationals.

KPoly wraps a sympy Poly in the Schwinger variables whose coefficient domain
is the polynomial ring over QQ in the kinematic symbols, so Symanzik output
stays symbolic while specialized polynomials drop to plain QQ coefficients.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field
from sympy import Matrix, Poly, QQ, Rational, Symbol

# Configure module-specific logger
logger = logging.getLogger(__name__)

Substitutions = Mapping[Symbol, Rational]


class PolyError(Exception):
    """Base exception for exact polynomial algebra"""

    pass


class ArityMismatchError(PolyError):
    """Raised when two polynomials live in different numbers of α-variables"""

    pass


class UnknownVariableError(PolyError):
    """Raised when a variable is not one of the polynomial's α-variables"""

    pass


class NotQuadraticError(PolyError):
    """Raised when a quadratic form is requested for a non-quadratic polynomial"""

    pass


class SingularMatrixError(PolyError):
    """Raised when an exact matrix has zero determinant"""

    pass


def alpha_symbols(count: int, names: Optional[Sequence[str]] = None) -> Tuple[Symbol, ...]:
    """Schwinger variables alpha_<name>, named after edge ids when given."""
    if names is None:
        names = [str(i) for i in range(1, count + 1)]
    return tuple(Symbol(f"alpha_{name}") for name in names)


def _coefficient_domain(symbols: Iterable[Symbol]):
    ordered = sorted(set(symbols), key=lambda s: s.name)
    if not ordered:
        return QQ
    return QQ.poly_ring(*ordered)


class KPoly:
    """
    Polynomial in α-variables with coefficients in QQ[kinematic symbols].

    Terms are canonical (sympy keeps a sorted sparse representation without
    zero coefficients), so equality is structural.
    """

    __slots__ = ("poly", "alphas")

    def __init__(self, expr: Union[sp.Expr, Poly, int], alphas: Sequence[Symbol]):
        alphas = tuple(alphas)
        if isinstance(expr, Poly):
            expr = expr.as_expr()
        expr = sp.sympify(expr)
        kinematic = expr.free_symbols - set(alphas)
        self.poly: Poly = Poly(expr, *alphas, domain=_coefficient_domain(kinematic))
        self.alphas: Tuple[Symbol, ...] = alphas

    @classmethod
    def from_terms(
        cls, terms: Mapping[Tuple[int, ...], sp.Expr], alphas: Sequence[Symbol]
    ) -> "KPoly":
        expr = sp.Add(
            *(
                coeff * sp.Mul(*(a**k for a, k in zip(alphas, exps)))
                for exps, coeff in terms.items()
            )
        )
        return cls(expr, alphas)

    @property
    def arity(self) -> int:
        return len(self.alphas)

    @property
    def kinematic_symbols(self) -> Tuple[Symbol, ...]:
        return tuple(sorted(self.as_expr().free_symbols - set(self.alphas), key=lambda s: s.name))

    def as_expr(self) -> sp.Expr:
        return self.poly.as_expr()

    def terms(self) -> Dict[Tuple[int, ...], sp.Expr]:
        """Exponent vector -> coefficient (a sympy expression in kinematic symbols)."""
        if self.poly.is_zero:
            return {}
        return {exps: sp.expand(c) for exps, c in self.poly.as_dict(native=False).items()}

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def total_degree(self) -> int:
        if self.poly.is_zero:
            return -1
        return self.poly.total_degree()

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        if self.poly.is_zero:
            return True
        degrees = {sum(exps) for exps in self.terms()}
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def _check_arity(self, other: "KPoly") -> None:
        if self.alphas != other.alphas:
            raise ArityMismatchError(
                f"α-variables differ: {self.alphas} vs {other.alphas}"
            )

    def __add__(self, other: "KPoly") -> "KPoly":
        return poly_arith(self, other, "add")

    def __sub__(self, other: "KPoly") -> "KPoly":
        return poly_arith(self, other, "sub")

    def __mul__(self, other: Union["KPoly", int, sp.Expr]) -> "KPoly":
        if isinstance(other, KPoly):
            return poly_arith(self, other, "mul")
        return KPoly(self.as_expr() * other, self.alphas)

    __rmul__ = __mul__

    def __neg__(self) -> "KPoly":
        return KPoly(-self.as_expr(), self.alphas)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KPoly):
            return NotImplemented
        return self.alphas == other.alphas and sp.expand(self.as_expr() - other.as_expr()) == 0

    def __hash__(self) -> int:
        return hash((self.alphas, tuple(sorted(self.terms().items(), key=lambda t: t[0]))))

    def __repr__(self) -> str:
        return f"KPoly({self.to_text()})"

    def specialize(self, subs: Substitutions) -> "KPoly":
        """Substitute exact values for kinematic symbols; the result has QQ coefficients
        when every kinematic symbol is assigned."""
        return KPoly(sp.expand(self.as_expr().subs(dict(subs))), self.alphas)

    def restrict(self, zero_indices: Iterable[int]) -> "KPoly":
        """Set the listed α-variables (0-based positions) to zero and compact the arity."""
        zero = set(zero_indices)
        for index in zero:
            if index < 0 or index >= self.arity:
                raise UnknownVariableError(f"no α-variable at position {index}")
        kept = tuple(a for i, a in enumerate(self.alphas) if i not in zero)
        expr = self.as_expr().subs({self.alphas[i]: 0 for i in zero})
        return KPoly(expr, kept)

    def rename(self, alphas: Sequence[Symbol]) -> "KPoly":
        alphas = tuple(alphas)
        if len(alphas) != self.arity:
            raise ArityMismatchError("renaming must keep the number of α-variables")
        return KPoly(self.as_expr().subs(dict(zip(self.alphas, alphas)), simultaneous=True), alphas)

    def index_of(self, var: Union[int, Symbol, str]) -> int:
        if isinstance(var, int):
            if 0 <= var < self.arity:
                return var
            raise UnknownVariableError(f"no α-variable at position {var}")
        name = var.name if isinstance(var, Symbol) else var
        for i, a in enumerate(self.alphas):
            if a.name == name:
                return i
        raise UnknownVariableError(f"{name} is not one of {[a.name for a in self.alphas]}")

    def to_text(self) -> str:
        """Canonical rendering: terms by descending exponent vector, coefficients expanded."""
        terms = self.terms()
        if not terms:
            return "0"
        parts: List[str] = []
        for exps in sorted(terms, reverse=True):
            monomial = "*".join(
                a.name if k == 1 else f"{a.name}^{k}"
                for a, k in zip(self.alphas, exps)
                if k
            )
            coeff = sp.sstr(terms[exps], order="lex")
            if not monomial:
                parts.append(f"({coeff})")
            elif coeff == "1":
                parts.append(monomial)
            else:
                parts.append(f"({coeff})*{monomial}")
        return " + ".join(parts)


def poly_arith(a: KPoly, b: KPoly, op: str) -> KPoly:
    """Exact add, sub or mul of two polynomials over the same α-variables."""
    a._check_arity(b)
    if op == "add":
        expr = a.as_expr() + b.as_expr()
    elif op == "sub":
        expr = a.as_expr() - b.as_expr()
    elif op == "mul":
        expr = a.as_expr() * b.as_expr()
    else:
        raise PolyError(f"Unknown polynomial operation: {op}")
    return KPoly(sp.expand(expr), a.alphas)


def partial_derivative(p: KPoly, var: Union[int, Symbol, str]) -> KPoly:
    index = p.index_of(var)
    return KPoly(p.poly.diff(p.alphas[index]), p.alphas)


class QuadricForm:
    """Symmetric matrix C of a homogeneous quadratic, q = α C αᵀ."""

    def __init__(self, entries: Matrix):
        entries = Matrix(entries)
        if entries.rows != entries.cols:
            raise PolyError("quadric matrix must be square")
        if any(sp.expand(entries[i, j] - entries[j, i]) != 0 for i in range(entries.rows) for j in range(i)):
            raise PolyError("quadric matrix must be symmetric")
        self.entries: Matrix = entries

    @property
    def dim(self) -> int:
        return self.entries.rows

    def specialize(self, subs: Substitutions) -> "QuadricForm":
        return QuadricForm(self.entries.subs(dict(subs)).applyfunc(sp.nsimplify))

    def is_numeric(self) -> bool:
        return all(entry.is_Rational for entry in self.entries)

    def as_kpoly(self, alphas: Sequence[Symbol]) -> KPoly:
        vec = Matrix(list(alphas))
        return KPoly(sp.expand((vec.T * self.entries * vec)[0, 0]), alphas)

    def minor(self, removed: Iterable[int]) -> "QuadricForm":
        """Matrix of the quadric restricted to α_i = 0 for the removed positions."""
        removed = set(removed)
        keep = [i for i in range(self.dim) if i not in removed]
        return QuadricForm(self.entries.extract(keep, keep))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadricForm):
            return NotImplemented
        return self.dim == other.dim and (self.entries - other.entries).applyfunc(sp.expand).is_zero_matrix

    def __repr__(self) -> str:
        return f"QuadricForm({self.entries.tolist()})"


def quadratic_form_matrix(q: KPoly) -> QuadricForm:
    """Read off the symmetric matrix of a homogeneous quadratic; off-diagonal
    coefficients are halved."""
    if q.is_zero() or not q.is_homogeneous(2):
        raise NotQuadraticError(f"not a homogeneous quadratic: {q.to_text()}")
    n = q.arity
    C = sp.zeros(n, n)
    for exps, coeff in q.terms().items():
        support = [i for i, k in enumerate(exps) if k]
        if len(support) == 1:
            i = support[0]
            C[i, i] = coeff
        else:
            i, j = support
            C[i, j] = coeff / 2
            C[j, i] = coeff / 2
    return QuadricForm(C)


def _as_rational_matrix(C: Union[QuadricForm, Matrix], subs: Optional[Substitutions]) -> Matrix:
    M = C.entries if isinstance(C, QuadricForm) else Matrix(C)
    if subs:
        M = M.subs(dict(subs))
    M = M.applyfunc(sp.nsimplify)
    if not all(entry.is_Rational for entry in M):
        raise PolyError("matrix is not fully specialized to rationals")
    return M


def det_and_inverse(
    C: Union[QuadricForm, Matrix], subs: Optional[Substitutions] = None
) -> Tuple[Rational, Matrix]:
    """
    Exact determinant (fraction-free Bareiss) and inverse of a rational matrix.

    Args:
        C: Quadric form or matrix, possibly symbolic
        subs: Kinematic values to specialize symbolic entries

    Returns:
        (det, U) with C·U equal to the identity exactly

    Raises:
        SingularMatrixError: If the determinant vanishes
    """
    M = _as_rational_matrix(C, subs)
    det = M.det(method="bareiss")
    if det == 0:
        raise SingularMatrixError("matrix is singular at this kinematic point")
    U = M.inv(method="GE")
    if M * U != sp.eye(M.rows):
        raise PolyError("inverse failed exact verification")
    return sp.Rational(det), U


class LinearSolution(BaseModel):
    """Solution set of an exact linear system, or a certificate of inconsistency."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    consistent: bool = Field(..., description="Whether M x = rhs has a solution")
    particular: Optional[Matrix] = Field(None, description="Solution with free variables set to zero")
    nullspace: List[Matrix] = Field(default_factory=list, description="Basis of the kernel of M")
    certificate: Optional[Matrix] = Field(
        None, description="Vector y with yᵀM = 0 and yᵀrhs_j = 1 for some column j when inconsistent"
    )
    pivots: Tuple[int, ...] = Field(default=(), description="Pivot columns in the original order")


def linear_solve(
    M: Matrix, rhs: Matrix, column_order: Optional[Sequence[int]] = None
) -> LinearSolution:
    """
    Solve M x = rhs exactly by reduced row echelon form, one solution column
    per column of rhs.

    The particular solution sets every free variable to zero, so the pivoting
    order fixes it. `column_order` permutes the pivot search (used to check that
    class-level results do not depend on the choice).
    """
    M = Matrix(M)
    rhs = Matrix(rhs)
    n = M.cols
    order = list(column_order) if column_order is not None else list(range(n))
    if sorted(order) != list(range(n)):
        raise PolyError("column_order must be a permutation of the columns")
    permuted = M.extract(list(range(M.rows)), order)
    reduced, pivots = permuted.row_join(rhs).rref()

    if any(col >= n for col in pivots):
        for y in M.T.nullspace():
            for value in y.T * rhs:
                if value != 0:
                    logger.debug("Linear system inconsistent; certificate found")
                    return LinearSolution(consistent=False, certificate=y / value)
        raise PolyError("inconsistent system without certificate")

    x = sp.zeros(n, rhs.cols)
    for row, col in enumerate(pivots):
        for j in range(rhs.cols):
            x[order[col], j] = reduced[row, n + j]
    kernel = []
    for vec in permuted.nullspace():
        original = sp.zeros(n, 1)
        for k, col in enumerate(order):
            original[col, 0] = vec[k, 0]
        kernel.append(original)
    return LinearSolution(
        consistent=True,
        particular=x,
        nullspace=kernel,
        pivots=tuple(sorted(order[c] for c in pivots)),
    )


__all__ = [
    "PolyError",
    "ArityMismatchError",
    "UnknownVariableError",
    "NotQuadraticError",
    "SingularMatrixError",
    "KPoly",
    "QuadricForm",
    "LinearSolution",
    "alpha_symbols",
    "poly_arith",
    "partial_derivative",
    "quadratic_form_matrix",
    "det_and_inverse",
    "linear_solve",
]
