"""
Feynman graphs, kinematic points, contraction and genericity predicates.
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Configure module-specific logger
logger = logging.getLogger(__name__)


class GraphError(Exception):
    """Base exception for graph and kinematics errors"""

    pass


class UnknownEdgeError(GraphError):
    """Raised when an edge id is not part of the graph"""

    pass


class ContractionError(GraphError):
    """Raised when a contraction would collapse a component to a point"""

    pass


class DisconnectedGraphError(GraphError):
    """Raised when a graph is not connected"""

    pass


class MissingInvariantError(GraphError):
    """Raised when a kinematic point does not assign a required invariant"""

    pass


class NotOneLoopError(GraphError):
    """Raised when a one-loop cycle graph is required"""

    pass


class InternalEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    endpoints: Tuple[str, str]
    mass: Optional[str] = Field(None, description="Mass symbol, None for a massless edge")

    @property
    def is_massive(self) -> bool:
        return self.mass is not None

    @property
    def is_self_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


class ExternalLeg(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    vertex: str
    momentum: str


class FeynmanGraph(BaseModel):
    """Multigraph with masses on internal edges and momenta on external legs."""

    model_config = ConfigDict(frozen=True)

    name: str = "graph"
    vertices: Tuple[str, ...]
    edges: Tuple[InternalEdge, ...]
    legs: Tuple[ExternalLeg, ...] = ()

    @model_validator(mode="after")
    def _check_structure(self) -> "FeynmanGraph":
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError(f"duplicate vertex id in graph {self.name}")
        for ids, kind in ((self.edge_ids, "edge"), (tuple(leg.id for leg in self.legs), "leg")):
            seen: Set[str] = set()
            for item in ids:
                if item in seen:
                    raise GraphError(f"duplicate {kind} id: {item}")
                seen.add(item)
        vertex_set = set(self.vertices)
        for edge in self.edges:
            for v in edge.endpoints:
                if v not in vertex_set:
                    raise GraphError(f"edge {edge.id} uses unknown vertex {v}")
        for leg in self.legs:
            if leg.vertex not in vertex_set:
                raise GraphError(f"leg {leg.id} attaches to unknown vertex {leg.vertex}")
        if _component_count(self.vertices, self.edges) != 1:
            raise DisconnectedGraphError(f"graph {self.name} is not connected")
        return self

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(edge.id for edge in self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def loop_number(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def massive_edges(self) -> Tuple[InternalEdge, ...]:
        return tuple(edge for edge in self.edges if edge.is_massive)

    @property
    def is_one_loop_cycle(self) -> bool:
        """Single cycle e_1…e_N with exactly one external leg per vertex."""
        if self.loop_number != 1 or any(edge.is_self_loop for edge in self.edges):
            return False
        degree = {v: 0 for v in self.vertices}
        for edge in self.edges:
            for v in edge.endpoints:
                degree[v] += 1
        if any(d != 2 for d in degree.values()):
            return False
        legs_at = {v: 0 for v in self.vertices}
        for leg in self.legs:
            legs_at[leg.vertex] += 1
        return all(count == 1 for count in legs_at.values())

    def edge(self, edge_id: str) -> InternalEdge:
        for edge in self.edges:
            if edge.id == edge_id:
                return edge
        raise UnknownEdgeError(f"unknown edge id: {edge_id}")

    def edge_index(self, edge_id: str) -> int:
        """0-based position of an edge, which is also its α-variable position."""
        for i, edge in enumerate(self.edges):
            if edge.id == edge_id:
                return i
        raise UnknownEdgeError(f"unknown edge id: {edge_id}")

    def leg_numbers_at(self, vertex: str) -> Tuple[int, ...]:
        """1-based leg numbers attached to a vertex; these index the s-invariants."""
        return tuple(i + 1 for i, leg in enumerate(self.legs) if leg.vertex == vertex)

    def alphas(self) -> Tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(f"alpha_{edge.id}") for edge in self.edges)

    def mass_symbol(self, edge_id: str) -> Optional[sp.Symbol]:
        edge = self.edge(edge_id)
        if edge.mass is None:
            return None
        return mass_squared_symbol(edge.mass)


def s_symbol(i: int, j: int) -> sp.Symbol:
    i, j = min(i, j), max(i, j)
    return sp.Symbol(f"s[{i},{j}]")


def mass_squared_symbol(mass: str) -> sp.Symbol:
    return sp.Symbol(f"{mass}^2")


def invariant_expr(legs: Iterable[int]) -> sp.Expr:
    """(∑_{i∈I} q_i)² expanded as ∑_{i,j∈I} s_{i,j}."""
    legs = sorted(set(legs))
    return sp.Add(
        *(s_symbol(i, i) for i in legs),
        *(2 * s_symbol(i, j) for i, j in itertools.combinations(legs, 2)),
    )


def require_one_loop(g: FeynmanGraph) -> None:
    if not g.is_one_loop_cycle:
        raise NotOneLoopError(f"{g.name} is not a one-loop cycle with one leg per vertex")


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent: Dict[str, str] = {item: item for item in items}

    def find(self, item: str) -> str:
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _component_count(vertices: Sequence[str], edges: Iterable[InternalEdge]) -> int:
    uf = _UnionFind(vertices)
    for edge in edges:
        uf.union(*edge.endpoints)
    return len({uf.find(v) for v in vertices})


def contract(g: FeynmanGraph, edges: Iterable[str]) -> FeynmanGraph:
    """
    Contract the given internal edges.

    Merged vertices keep the id of the earliest vertex in the class; legs follow
    their vertex. Remaining edges keep their ids and masses.

    Raises:
        UnknownEdgeError: If an edge id is not in the graph
        ContractionError: If every edge would be contracted
    """
    contracted = set(edges)
    for edge_id in contracted:
        g.edge(edge_id)
    if not contracted:
        return g
    remaining = [edge for edge in g.edges if edge.id not in contracted]
    if not remaining:
        raise ContractionError(f"contracting all edges of {g.name} collapses it to a point")

    uf = _UnionFind(g.vertices)
    order = {v: i for i, v in enumerate(g.vertices)}
    for edge in g.edges:
        if edge.id in contracted:
            a, b = uf.find(edge.endpoints[0]), uf.find(edge.endpoints[1])
            if a != b:
                keep, drop = (a, b) if order[a] < order[b] else (b, a)
                uf.parent[drop] = keep

    vertices = tuple(v for v in g.vertices if uf.find(v) == v)
    new_edges = tuple(
        InternalEdge(
            id=edge.id,
            endpoints=(uf.find(edge.endpoints[0]), uf.find(edge.endpoints[1])),
            mass=edge.mass,
        )
        for edge in remaining
    )
    new_legs = tuple(
        ExternalLeg(id=leg.id, vertex=uf.find(leg.vertex), momentum=leg.momentum)
        for leg in g.legs
    )
    logger.debug(f"Contracted {sorted(contracted)} in {g.name}: {len(vertices)} vertices left")
    return FeynmanGraph(
        name=f"{g.name}/{','.join(sorted(contracted))}",
        vertices=vertices,
        edges=new_edges,
        legs=new_legs,
    )


class MoticSubgraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    edge_subset: FrozenSet[str]
    is_mass_momentum_spanning: bool
    loop_number: int

    @field_validator("edge_subset")
    @classmethod
    def _non_empty(cls, value: FrozenSet[str]) -> FrozenSet[str]:
        if not value:
            raise ValueError("a motic subgraph has at least one edge")
        return value


def _subgraph_loop_number(g: FeynmanGraph, subset: FrozenSet[str]) -> int:
    chosen = [edge for edge in g.edges if edge.id in subset]
    touched = sorted({v for edge in chosen for v in edge.endpoints})
    if not chosen:
        return 0
    return len(chosen) - len(touched) + _component_count(touched, chosen)


def is_mass_momentum_spanning(g: FeynmanGraph, subset: FrozenSet[str]) -> bool:
    """Contains every massive edge and connects every vertex that carries a leg."""
    if any(edge.id not in subset for edge in g.massive_edges):
        return False
    external = sorted({leg.vertex for leg in g.legs})
    if not external:
        return True
    chosen = [edge for edge in g.edges if edge.id in subset]
    touched = {v for edge in chosen for v in edge.endpoints}
    if not set(external) <= touched:
        return False
    uf = _UnionFind(sorted(touched | set(external)))
    for edge in chosen:
        uf.union(*edge.endpoints)
    return len({uf.find(v) for v in external}) == 1


def is_motic(g: FeynmanGraph, subset: FrozenSet[str]) -> bool:
    """
    Every proper subgraph that matters must lose loop number. When the subset is
    mass-momentum spanning only its mass-momentum spanning subgraphs matter,
    otherwise all of them do.
    """
    loops = _subgraph_loop_number(g, subset)
    spanning = is_mass_momentum_spanning(g, subset)
    members = sorted(subset)
    for size in range(len(members)):
        for smaller in itertools.combinations(members, size):
            smaller = frozenset(smaller)
            if spanning and not is_mass_momentum_spanning(g, smaller):
                continue
            if _subgraph_loop_number(g, smaller) >= loops:
                return False
    return True


def motic_subgraphs(g: FeynmanGraph) -> List[MoticSubgraph]:
    """All non-empty proper edge subsets satisfying the motic predicate."""
    ids = g.edge_ids
    found: List[MoticSubgraph] = []
    for size in range(1, len(ids)):
        for subset in itertools.combinations(ids, size):
            subset = frozenset(subset)
            if is_motic(g, subset):
                found.append(
                    MoticSubgraph(
                        edge_subset=subset,
                        is_mass_momentum_spanning=is_mass_momentum_spanning(g, subset),
                        loop_number=_subgraph_loop_number(g, subset),
                    )
                )
    logger.debug(f"{g.name}: {len(found)} motic subgraphs")
    return found


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, float):
        raise ValueError("kinematic values must be exact rationals, not floats")
    return Fraction(value)


class KinematicPoint(BaseModel):
    """Exact values of s_{i,j} (i ≤ j, 1-based legs) and of m_e² per edge id."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: Dict[Tuple[int, int], Fraction] = Field(default_factory=dict)
    msq: Dict[str, Fraction] = Field(default_factory=dict)

    @field_validator("s", mode="before")
    @classmethod
    def _normalize_s(cls, value):
        normalized = {}
        for (i, j), v in dict(value).items():
            key = (min(int(i), int(j)), max(int(i), int(j)))
            normalized[key] = _to_fraction(v)
        return normalized

    @field_validator("msq", mode="before")
    @classmethod
    def _normalize_msq(cls, value):
        normalized = {}
        for key, v in dict(value).items():
            v = _to_fraction(v)
            if v < 0:
                raise ValueError(f"squared mass of {key} must be non-negative")
            normalized[str(key)] = v
        return normalized

    def s_value(self, i: int, j: int) -> Fraction:
        key = (min(i, j), max(i, j))
        if key not in self.s:
            raise MissingInvariantError(f"s[{key[0]},{key[1]}] is not assigned")
        return self.s[key]

    def s_invariant(self, legs: Iterable[int]) -> Fraction:
        legs = sorted(set(legs))
        total = sum((self.s_value(i, i) for i in legs), Fraction(0))
        total += 2 * sum((self.s_value(i, j) for i, j in itertools.combinations(legs, 2)), Fraction(0))
        return total

    def mass_squared(self, g: FeynmanGraph, edge_id: str) -> Fraction:
        edge = g.edge(edge_id)
        if edge.mass is None:
            return Fraction(0)
        if edge_id not in self.msq:
            raise MissingInvariantError(f"squared mass of edge {edge_id} is not assigned")
        return self.msq[edge_id]

    def substitutions(self, g: FeynmanGraph) -> Dict[sp.Symbol, sp.Rational]:
        """Symbol -> exact value for every invariant of g."""
        subs: Dict[sp.Symbol, sp.Rational] = {}
        legs = range(1, len(g.legs) + 1)
        for i, j in itertools.combinations_with_replacement(legs, 2):
            value = self.s_value(i, j)
            subs[s_symbol(i, j)] = sp.Rational(value.numerator, value.denominator)
        for edge in g.massive_edges:
            value = self.mass_squared(g, edge.id)
            symbol = mass_squared_symbol(edge.mass)
            rational = sp.Rational(value.numerator, value.denominator)
            if symbol in subs and subs[symbol] != rational:
                raise GraphError(f"edges sharing mass {edge.mass} have different values")
            subs[symbol] = rational
        return subs

    def perturbed(self, s_delta: Dict[Tuple[int, int], Fraction]) -> "KinematicPoint":
        s = dict(self.s)
        for key, delta in s_delta.items():
            key = (min(key), max(key))
            s[key] = s.get(key, Fraction(0)) + _to_fraction(delta)
        return KinematicPoint(s=s, msq=self.msq)

    @classmethod
    def uniform(
        cls,
        g: FeynmanGraph,
        msq=1,
        s_diagonal=1,
        s_offdiagonal=Fraction(-1, 7),
    ) -> "KinematicPoint":
        """Point with equal squared masses, equal q_i² and equal q_i·q_j."""
        legs = range(1, len(g.legs) + 1)
        s = {
            (i, j): _to_fraction(s_diagonal if i == j else s_offdiagonal)
            for i, j in itertools.combinations_with_replacement(legs, 2)
        }
        return cls(s=s, msq={edge.id: _to_fraction(msq) for edge in g.massive_edges})


class GenericityReport(BaseModel):
    passed: bool
    violations: List[str] = Field(default_factory=list)
    euclidean: bool


def validate_generic(g: FeynmanGraph, p: KinematicPoint) -> GenericityReport:
    """
    Check s_I + m_j² ≠ 0 over all non-empty proper leg subsets I and all
    j ∈ {0…M} with m_0 = 0, and report Euclidean-sheet membership.
    """
    legs = list(range(1, len(g.legs) + 1))
    masses: List[Tuple[str, Fraction]] = [("m_0", Fraction(0))]
    for edge in g.massive_edges:
        masses.append((edge.mass, p.mass_squared(g, edge.id)))

    violations: List[str] = []
    euclidean = all(value > 0 for _, value in masses[1:])
    for size in range(1, len(legs)):
        for subset in itertools.combinations(legs, size):
            s_I = p.s_invariant(subset)
            if s_I <= 0:
                euclidean = False
            for name, value in masses:
                if s_I + value == 0:
                    label = ",".join(str(i) for i in subset)
                    violations.append(f"s_{{{label}}} + {name}^2 = 0")
    if violations:
        logger.warning(f"{g.name}: {len(violations)} genericity constraints violated")
    return GenericityReport(passed=not violations, violations=violations, euclidean=euclidean)


def cycle_graph(n: int, masses: Optional[Sequence[Optional[str]]] = None, name: Optional[str] = None) -> FeynmanGraph:
    """
    One-loop cycle with edges e_i = (v_i, v_{i+1}) and leg q_i at v_i.

    Args:
        n: Number of edges, at least 2
        masses: Mass symbol per edge, None for massless; defaults to m1…mn
    """
    if n < 2:
        raise GraphError("a one-loop cycle needs at least two edges")
    if masses is None:
        masses = [f"m{i}" for i in range(1, n + 1)]
    if len(masses) != n:
        raise GraphError("one mass entry per edge is required")
    vertices = tuple(f"v{i}" for i in range(1, n + 1))
    edges = tuple(
        InternalEdge(id=f"e{i}", endpoints=(f"v{i}", f"v{i % n + 1}"), mass=masses[i - 1])
        for i in range(1, n + 1)
    )
    legs = tuple(ExternalLeg(id=f"q{i}", vertex=f"v{i}", momentum=f"q{i}") for i in range(1, n + 1))
    return FeynmanGraph(name=name or f"cycle{n}", vertices=vertices, edges=edges, legs=legs)


def triangle_graph(masses: Optional[Sequence[Optional[str]]] = None, name: str = "triangle") -> FeynmanGraph:
    """Triangle with edge e_i opposite vertex v_i, so q_i² multiplies α_jα_k."""
    if masses is None:
        masses = ["m1", "m2", "m3"]
    if len(masses) != 3:
        raise GraphError("a triangle has three edges")
    vertices = ("v1", "v2", "v3")
    edges = (
        InternalEdge(id="e1", endpoints=("v2", "v3"), mass=masses[0]),
        InternalEdge(id="e2", endpoints=("v3", "v1"), mass=masses[1]),
        InternalEdge(id="e3", endpoints=("v1", "v2"), mass=masses[2]),
    )
    legs = tuple(ExternalLeg(id=f"q{i}", vertex=f"v{i}", momentum=f"q{i}") for i in range(1, 4))
    return FeynmanGraph(name=name, vertices=vertices, edges=edges, legs=legs)


def sunrise_graph(name: str = "sunrise") -> FeynmanGraph:
    """Two vertices joined by three massive edges, one leg at each vertex."""
    edges = tuple(InternalEdge(id=f"e{i}", endpoints=("v1", "v2"), mass=f"m{i}") for i in range(1, 4))
    legs = (
        ExternalLeg(id="q1", vertex="v1", momentum="q1"),
        ExternalLeg(id="q2", vertex="v2", momentum="q2"),
    )
    return FeynmanGraph(name=name, vertices=("v1", "v2"), edges=edges, legs=legs)


__all__ = [
    "GraphError",
    "UnknownEdgeError",
    "ContractionError",
    "DisconnectedGraphError",
    "MissingInvariantError",
    "NotOneLoopError",
    "InternalEdge",
    "ExternalLeg",
    "FeynmanGraph",
    "KinematicPoint",
    "MoticSubgraph",
    "GenericityReport",
    "s_symbol",
    "mass_squared_symbol",
    "invariant_expr",
    "require_one_loop",
    "contract",
    "is_mass_momentum_spanning",
    "is_motic",
    "motic_subgraphs",
    "validate_generic",
    "cycle_graph",
    "triangle_graph",
    "sunrise_graph",
]
