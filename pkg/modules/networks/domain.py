"""
Domain types for multicast networks.

All types are immutable after construction and safe to share between
threads and worker processes.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Tuple

import networkx as nx

from shared.utils import natural_key


class Edge(NamedTuple):
    """A single directed edge. Parallel edges differ only by id."""

    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class AxiomViolation:
    """One violated network axiom, numbered like the network definition (1-7)."""

    axiom: int
    message: str
    subject: Optional[str] = None

    def __str__(self):
        return f"axiom {self.axiom}: {self.message}"


@dataclass(frozen=True)
class Network:
    """
    A single-source network: finite acyclic multigraph, a source and terminals.

    Instances are produced by ``validate_network`` and always satisfy the
    network axioms. Edges are stored sorted by id so that two networks with
    the same content compare equal regardless of input order.
    """

    vertices: FrozenSet[str]
    edges: Tuple[Edge, ...]
    source: str
    terminals: FrozenSet[str]
    name: str = field(default='', compare=False)

    @cached_property
    def edge_map(self) -> Dict[str, Edge]:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        """networkx view of the multigraph, edge keys are edge ids."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(sorted(self.vertices, key=natural_key))
        for edge in self.edges:
            graph.add_edge(edge.tail, edge.head, key=edge.id)
        return graph

    @cached_property
    def intermediates(self) -> FrozenSet[str]:
        return self.vertices - self.terminals - {self.source}

    @cached_property
    def _incidence(self):
        incoming = {vertex: [] for vertex in self.vertices}
        outgoing = {vertex: [] for vertex in self.vertices}
        for edge in self.edges:
            outgoing[edge.tail].append(edge.id)
            incoming[edge.head].append(edge.id)
        return (
            {vertex: tuple(ids) for vertex, ids in incoming.items()},
            {vertex: tuple(ids) for vertex, ids in outgoing.items()},
        )

    def in_edge_ids(self, vertex: str) -> Tuple[str, ...]:
        """Incoming edge ids sorted by id (not by EdgeOrder)."""
        return self._incidence[0][vertex]

    def out_edge_ids(self, vertex: str) -> Tuple[str, ...]:
        """Outgoing edge ids sorted by id (not by EdgeOrder)."""
        return self._incidence[1][vertex]

    def sorted_vertices(self, vertices: Optional[Iterable[str]] = None) -> Tuple[str, ...]:
        return tuple(sorted(self.vertices if vertices is None else vertices, key=natural_key))

    def __str__(self):
        label = self.name or 'network'
        return f"{label} ({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class EdgeOrder:
    """
    A total order on the edges that extends the path partial order.

    ``sequence`` lists edge ids by rank; tuple positions of every function
    table are indexed through this order.
    """

    network: Network = field(compare=False, repr=False)
    sequence: Tuple[str, ...]

    @cached_property
    def rank(self):
        """Bijection from edge ids to 1..|E|."""
        return {edge_id: index + 1 for index, edge_id in enumerate(self.sequence)}

    def sorted(self, edge_ids: Iterable[str]) -> Tuple[str, ...]:
        rank = self.rank
        return tuple(sorted(edge_ids, key=rank.__getitem__))

    @cached_property
    def _incidence(self):
        incoming = {v: self.sorted(self.network.in_edge_ids(v)) for v in self.network.vertices}
        outgoing = {v: self.sorted(self.network.out_edge_ids(v)) for v in self.network.vertices}
        return incoming, outgoing

    def in_edges(self, vertex: str) -> Tuple[str, ...]:
        """in(V) in order; positions of the input tuple of F_V."""
        return self._incidence[0][vertex]

    def out_edges(self, vertex: str) -> Tuple[str, ...]:
        """out(V) in order; positions of the output tuple of F_V."""
        return self._incidence[1][vertex]


@dataclass(frozen=True, order=True)
class CutValue:
    """Number of edges in a minimum source-terminal cut."""

    value: int

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)
