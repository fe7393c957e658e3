"""
First and second Symanzik polynomials and parametric integrands.
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, FrozenSet, Optional, Tuple

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field, model_validator

from graphkin import (
    FeynmanGraph,
    contract,
    invariant_expr,
    mass_squared_symbol,
    require_one_loop,
)
from polyalg import KPoly

# Configure module-specific logger
logger = logging.getLogger(__name__)

# (vertex id, leg numbers) pairs and (α position, endpoint, endpoint) triples
_Vertices = Tuple[Tuple[str, FrozenSet[int]], ...]
_Edges = Tuple[Tuple[int, str, str], ...]


class SymanzikError(Exception):
    """Base exception for Symanzik polynomial construction"""

    pass


class UnsupportedDimensionError(SymanzikError):
    """Raised when an integrand is requested in an unsupported dimension"""

    pass


class SymanzikPair(BaseModel):
    """Ψ, Φ and Ξ = Φ + (∑ m_e² α_e)Ψ of one graph."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    psi: KPoly
    phi: KPoly
    xi: KPoly

    @model_validator(mode="after")
    def _check_degrees(self) -> "SymanzikPair":
        if not self.psi.is_homogeneous():
            raise SymanzikError("Ψ is not homogeneous")
        loops = self.psi.total_degree()
        if not self.phi.is_homogeneous(loops + 1) or not self.xi.is_homogeneous(loops + 1):
            raise SymanzikError("Φ and Ξ must be homogeneous of degree h + 1")
        if any(coeff != 1 for coeff in self.psi.terms().values()):
            raise SymanzikError("Ψ coefficients must all equal 1")
        return self


def _momentum_square(legs: FrozenSet[int], other: FrozenSet[int], highest: int, aliases: bool) -> sp.Expr:
    """(q^{T_1})² for the side with fewer legs; on a tie the side without the highest leg."""
    if len(other) < len(legs) or (len(other) == len(legs) and highest in legs):
        legs = other
    if not legs:
        return sp.Integer(0)
    if aliases:
        label = "+".join(f"q{i}" for i in sorted(legs))
        return sp.Symbol(f"{label}^2" if len(legs) == 1 else f"({label})^2")
    return invariant_expr(legs)


@lru_cache(maxsize=None)
def _deletion_contraction(
    vertices: _Vertices, edges: _Edges, alphas: Tuple[sp.Symbol, ...], highest: int, aliases: bool
) -> Tuple[sp.Expr, sp.Expr]:
    if not edges:
        if len(vertices) == 1:
            return sp.Integer(1), sp.Integer(0)
        if len(vertices) == 2:
            return sp.Integer(0), _momentum_square(vertices[0][1], vertices[1][1], highest, aliases)
        return sp.Integer(0), sp.Integer(0)

    (position, a, b), rest = edges[0], edges[1:]
    alpha = alphas[position]
    psi_del, phi_del = _deletion_contraction(vertices, rest, alphas, highest, aliases)
    if a == b:
        return sp.expand(alpha * psi_del), sp.expand(alpha * phi_del)

    legs = dict(vertices)
    merged = legs[a] | legs[b]
    contracted_vertices = tuple(
        sorted((v, merged if v == a else ls) for v, ls in vertices if v != b)
    )
    contracted_edges = tuple(
        sorted((pos, a if x == b else x, a if y == b else y) for pos, x, y in rest)
    )
    psi_con, phi_con = _deletion_contraction(contracted_vertices, contracted_edges, alphas, highest, aliases)
    return sp.expand(alpha * psi_del + psi_con), sp.expand(alpha * phi_del + phi_con)


def mass_term(g: FeynmanGraph) -> sp.Expr:
    """∑ m_e² α_e over the massive edges."""
    alphas = g.alphas()
    return sp.Add(
        *(mass_squared_symbol(edge.mass) * alphas[i] for i, edge in enumerate(g.edges) if edge.is_massive)
    )


def symanzik(g: FeynmanGraph, display_aliases: bool = False) -> SymanzikPair:
    """
    Compute Ψ, Φ and Ξ by deletion-contraction.

    Args:
        g: Connected Feynman graph
        display_aliases: Write momentum coefficients as q_i² and (q_i+q_j)²
            symbols instead of expanding them into s-invariants

    Returns:
        SymanzikPair with canonical polynomials
    """
    alphas = g.alphas()
    vertices = tuple(sorted((v, frozenset(g.leg_numbers_at(v))) for v in g.vertices))
    edges = tuple(sorted((i, e.endpoints[0], e.endpoints[1]) for i, e in enumerate(g.edges)))
    psi, phi = _deletion_contraction(vertices, edges, alphas, len(g.legs), display_aliases)
    xi = sp.expand(phi + mass_term(g) * psi)
    logger.debug(f"Symanzik polynomials of {g.name}: {len(sp.Add.make_args(xi))} terms in Ξ")
    return SymanzikPair(psi=KPoly(psi, alphas), phi=KPoly(phi, alphas), xi=KPoly(xi, alphas))


def alias_substitutions(g: FeynmanGraph) -> Dict[sp.Symbol, sp.Expr]:
    """Alias symbol -> expansion in s-invariants, for every leg subset of size ≤ F/2."""
    legs = range(1, len(g.legs) + 1)
    mapping: Dict[sp.Symbol, sp.Expr] = {}
    for size in range(1, len(g.legs) // 2 + 1):
        for subset in itertools.combinations(legs, size):
            label = "+".join(f"q{i}" for i in subset)
            symbol = sp.Symbol(f"{label}^2" if size == 1 else f"({label})^2")
            mapping[symbol] = invariant_expr(subset)
    return mapping


def xi_restrict(g: FeynmanGraph, contracted) -> KPoly:
    """Ξ_G with α_e = 0 for the contracted edges, arity compacted; equals Ξ of G/I."""
    contracted = set(contracted)
    # validates edge ids and the contraction itself
    contract(g, contracted)
    xi = symanzik(g).xi
    return xi.restrict(g.edge_index(edge_id) for edge_id in contracted)


class ParametricIntegrand(BaseModel):
    """ω = Ψ^a / Ξ^b · Ω_G over the simplex α_e ≥ 0."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    graph: FeynmanGraph
    dimension: int
    psi_power: int = Field(..., description="Exponent of Ψ in the numerator (may be negative)")
    xi_power: int = Field(..., description="Exponent of Ξ in the denominator")
    polynomials: SymanzikPair
    omega: Tuple[Tuple[int, int], ...] = Field(
        ..., description="Ω_G terms as (sign, α position): sign·α_i dα_1…dα_i-hat…dα_N"
    )
    divergent: bool = False
    divergence_reason: Optional[str] = None

    def render(self) -> str:
        n = self.graph.edge_count
        return f"Psi^{self.psi_power} / Xi^{self.xi_power} * Omega_{n}"


def omega_terms(n: int) -> Tuple[Tuple[int, int], ...]:
    """Ω = ∑ (−1)^{i−1} α_i dα_1∧…∧dα_i-hat∧…∧dα_n, 0-based positions."""
    return tuple(((-1) ** i, i) for i in range(n))


def build_integrand(g: FeynmanGraph, d: int) -> ParametricIntegrand:
    """
    Build the one-loop parametric integrand in d ∈ {2, 4}.

    The Γ-function prefactor is never included.
    """
    require_one_loop(g)
    if d not in (2, 4):
        raise UnsupportedDimensionError(f"dimension {d} is not supported, use 2 or 4")
    n = g.edge_count
    loops = g.loop_number
    psi_power = n - loops * d // 2 - d // 2
    xi_power = n - loops * d // 2

    divergent = False
    reason = None
    massless = [edge.id for edge in g.edges if not edge.is_massive]
    # Ξ is linear near a massless simplex vertex
    if massless and xi_power >= n - 1:
        divergent = True
        reason = f"Ξ vanishes at the simplex vertices of massless edges {massless}"
        logger.warning(f"{g.name} in d={d}: integral diverges ({reason})")

    return ParametricIntegrand(
        graph=g,
        dimension=d,
        psi_power=psi_power,
        xi_power=xi_power,
        polynomials=symanzik(g),
        omega=omega_terms(n),
        divergent=divergent,
        divergence_reason=reason,
    )


__all__ = [
    "SymanzikError",
    "UnsupportedDimensionError",
    "SymanzikPair",
    "ParametricIntegrand",
    "symanzik",
    "mass_term",
    "alias_substitutions",
    "xi_restrict",
    "omega_terms",
    "build_integrand",
]
