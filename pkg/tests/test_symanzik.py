import itertools

import pytest
import sympy as sp

from graphkin import cycle_graph, invariant_expr, sunrise_graph, triangle_graph
from symanzik import (
    UnsupportedDimensionError,
    alias_substitutions,
    build_integrand,
    omega_terms,
    symanzik,
    xi_restrict,
)


def _components(vertices, edges):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups = {}
    for v in vertices:
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def brute_force(g):
    """Ψ and Φ from spanning trees and spanning 2-forests."""
    alphas = g.alphas()
    psi = sp.Integer(0)
    phi = sp.Integer(0)
    vertex_count = len(g.vertices)
    highest = len(g.legs)
    for size in (vertex_count - 1, vertex_count - 2):
        for subset in itertools.combinations(range(g.edge_count), size):
            chosen = [g.edges[i].endpoints for i in subset]
            components = _components(g.vertices, chosen)
            # forests only: no cycles among the chosen edges
            if len(components) != vertex_count - size:
                continue
            monomial = sp.Mul(*(alphas[i] for i in range(g.edge_count) if i not in subset))
            if len(components) == 1:
                psi += monomial
            else:
                legs = [set(n for v in comp for n in g.leg_numbers_at(v)) for comp in components]
                a, b = legs
                side = b if len(b) < len(a) or (len(a) == len(b) and highest in a) else a
                if side:
                    phi += invariant_expr(side) * monomial
    mass = sp.Add(*(g.mass_symbol(e.id) * alphas[i] for i, e in enumerate(g.edges) if e.is_massive))
    return sp.expand(psi), sp.expand(phi), sp.expand(phi + mass * psi)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_cycles_match_brute_force(n):
    g = cycle_graph(n)
    pair = symanzik(g)
    psi, phi, xi = brute_force(g)
    assert sp.expand(pair.psi.as_expr() - psi) == 0
    assert sp.expand(pair.phi.as_expr() - phi) == 0
    assert sp.expand(pair.xi.as_expr() - xi) == 0


def test_sunrise_matches_brute_force():
    g = sunrise_graph()
    pair = symanzik(g)
    psi, phi, xi = brute_force(g)
    assert sp.expand(pair.psi.as_expr() - psi) == 0
    assert sp.expand(pair.phi.as_expr() - phi) == 0
    assert sp.expand(pair.xi.as_expr() - xi) == 0
    assert pair.psi.total_degree() == 2
    assert pair.xi.is_homogeneous(3)


def test_one_loop_psi_is_sum_of_alphas():
    g = cycle_graph(5)
    assert symanzik(g).psi.as_expr() == sp.Add(*g.alphas())


def test_triangle_face_coefficients():
    g = triangle_graph()
    a1, a2, a3 = g.alphas()
    phi = symanzik(g).phi.as_expr()
    # e_i is opposite v_i, so q_i² multiplies α_j α_k
    assert phi.coeff(a2).coeff(a3) == sp.Symbol("s[1,1]")


def test_display_aliases():
    g = cycle_graph(4)
    pair = symanzik(g, display_aliases=True)
    names = {symbol.name for symbol in pair.phi.kinematic_symbols}
    assert "q1^2" in names
    assert "(q1+q2)^2" in names
    expanded = pair.phi.as_expr().xreplace(alias_substitutions(g))
    assert sp.expand(expanded - symanzik(g).phi.as_expr()) == 0


def test_xi_restrict_equals_contraction():
    g = cycle_graph(5)
    restricted = xi_restrict(g, ["e2"])
    assert restricted.arity == 4
    assert sp.Symbol("alpha_e2") not in restricted.alphas
    assert all(xi_restrict(g, [edge]).arity == 4 for edge in g.edge_ids)


def test_box_integrand_powers():
    ig = build_integrand(cycle_graph(4), 4)
    assert (ig.psi_power, ig.xi_power) == (0, 2)
    assert not ig.divergent
    assert ig.render() == "Psi^0 / Xi^2 * Omega_4"


def test_bubble_integrand_powers():
    assert build_integrand(cycle_graph(2), 4).psi_power == -2
    ig = build_integrand(cycle_graph(2), 2)
    assert (ig.psi_power, ig.xi_power) == (0, 1)


def test_massless_edge_diverges_in_two_dimensions():
    assert not build_integrand(triangle_graph(["m1", None, "m3"]), 4).divergent
    ig = build_integrand(triangle_graph(["m1", None, "m3"]), 2)
    assert ig.divergent
    assert "e2" in ig.divergence_reason


def test_unsupported_dimension():
    with pytest.raises(UnsupportedDimensionError):
        build_integrand(cycle_graph(3), 6)


def test_omega_signs_alternate():
    assert omega_terms(3) == ((1, 0), (-1, 1), (1, 2))
