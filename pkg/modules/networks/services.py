"""
Business logic services for multicast networks.

Every operation is a pure function of its inputs.
"""

import itertools
import logging
import re
from typing import Iterator, List, Mapping, Optional, Sequence

import networkx as nx
from django.conf import settings
from networkx.algorithms.flow import edmonds_karp

from shared.exceptions import NetworkValidationError, NotFoundException, ValidationException
from shared.utils import natural_key
from .domain import AxiomViolation, CutValue, Edge, EdgeOrder, Network

logger = logging.getLogger(__name__)


def check_axioms(candidate: Mapping) -> List[AxiomViolation]:
    """
    Check a raw network description against all seven network axioms.

    Args:
        candidate: Mapping with ``vertices``, ``edges`` ([id, tail, head] triples),
            ``source`` and ``terminals``

    Returns:
        Every violated axiom; empty when the candidate is a valid network
    """
    violations = []
    vertices = set(candidate.get('vertices') or ())
    source = candidate.get('source')
    terminals = set(candidate.get('terminals') or ())
    raw_edges = [tuple(edge) for edge in candidate.get('edges') or ()]

    graph = nx.MultiDiGraph()
    graph.add_nodes_from(vertices)
    seen_ids = set()
    for edge_id, tail, head in raw_edges:
        if edge_id in seen_ids:
            violations.append(AxiomViolation(1, f"duplicate edge id '{edge_id}'", edge_id))
            continue
        seen_ids.add(edge_id)
        missing = [end for end in (tail, head) if end not in vertices]
        if missing:
            violations.append(AxiomViolation(
                1, f"edge '{edge_id}' references unknown vertex '{missing[0]}'", edge_id))
            continue
        graph.add_edge(tail, head, key=edge_id)

    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        path = ' -> '.join([str(step[0]) for step in cycle] + [str(cycle[-1][1])])
        violations.append(AxiomViolation(1, f"cycle detected: {path}"))

    if source not in vertices:
        violations.append(AxiomViolation(2, f"source '{source}' is not a vertex", source))
    for terminal in sorted(terminals - vertices, key=natural_key):
        violations.append(AxiomViolation(3, f"terminal '{terminal}' is not a vertex", terminal))
    if not terminals:
        violations.append(AxiomViolation(4, "there are no terminals"))
    if source in terminals:
        violations.append(AxiomViolation(4, f"source '{source}' is listed as a terminal", source))

    if source in graph:
        for edge_id in sorted((key for _, _, key in graph.in_edges(source, keys=True)), key=natural_key):
            violations.append(AxiomViolation(5, f"source has incoming edge '{edge_id}'", edge_id))
    for terminal in sorted(terminals & vertices, key=natural_key):
        for _, head, edge_id in graph.out_edges(terminal, keys=True):
            violations.append(AxiomViolation(
                5, f"terminal '{terminal}' has outgoing edge '{edge_id}' to '{head}'", edge_id))

    reachable = nx.descendants(graph, source) if source in graph else set()
    for terminal in sorted(terminals & vertices, key=natural_key):
        if terminal not in reachable:
            violations.append(AxiomViolation(6, f"terminal '{terminal}' is unreachable from the source", terminal))

    reaches_terminal = set()
    for terminal in terminals & vertices:
        reaches_terminal |= nx.ancestors(graph, terminal)
    for vertex in sorted(vertices - terminals - {source}, key=natural_key):
        if vertex not in reachable:
            violations.append(AxiomViolation(
                7, f"vertex '{vertex}' is not reachable from the source", vertex))
        elif vertex not in reaches_terminal:
            violations.append(AxiomViolation(7, f"vertex '{vertex}' reaches no terminal", vertex))

    return violations


def validate_network(candidate: Mapping, name: str = '') -> Network:
    """
    Build a Network from a raw description, reporting every violated axiom.

    Raises:
        NetworkValidationError: with the complete list of violations
    """
    violations = check_axioms(candidate)
    if violations:
        logger.debug(f"Network '{name}' rejected with {len(violations)} violation(s)")
        raise NetworkValidationError(violations)

    edges = tuple(sorted(
        (Edge(*map(str, edge)) for edge in candidate['edges']),
        key=lambda edge: natural_key(edge.id),
    ))
    return Network(
        vertices=frozenset(map(str, candidate['vertices'])),
        edges=edges,
        source=str(candidate['source']),
        terminals=frozenset(map(str, candidate['terminals'])),
        name=name or candidate.get('name', '') or '',
    )


def serialize_network(network: Network) -> dict:
    """Plain description of a network in the network file layout."""
    data = {
        'vertices': list(network.sorted_vertices()),
        'edges': [[edge.id, edge.tail, edge.head] for edge in network.edges],
        'source': network.source,
        'terminals': list(network.sorted_vertices(network.terminals)),
    }
    if network.name:
        data['name'] = network.name
    return data


def vertex_layers(network: Network) -> dict:
    """Topological layer of every vertex (longest path length from the source)."""
    layers = {}
    for depth, generation in enumerate(nx.topological_generations(network.graph)):
        for vertex in generation:
            layers[vertex] = depth
    return layers


def extend_edge_order(network: Network) -> EdgeOrder:
    """
    Deterministic total order extending the path order on edges.

    Primary key is the layer of the tail vertex, secondary key the edge id.
    """
    layers = vertex_layers(network)
    sequence = sorted(
        network.edges,
        key=lambda edge: (layers[edge.tail], natural_key(edge.id)),
    )
    return EdgeOrder(network=network, sequence=tuple(edge.id for edge in sequence))


def _edge_precedence(network: Network) -> nx.DiGraph:
    """Edge e precedes e' when head(e) == tail(e'); its closure is the path order."""
    precedence = nx.DiGraph()
    precedence.add_nodes_from(edge.id for edge in network.edges)
    for edge in network.edges:
        for successor in network.out_edge_ids(edge.head):
            precedence.add_edge(edge.id, successor)
    return precedence


def edge_order_from_sequence(network: Network, edge_ids: Sequence[str]) -> EdgeOrder:
    """
    Wrap a caller-supplied edge sequence after checking it extends the path order.

    Raises:
        ValidationException: if the sequence is not a legal extension
    """
    edge_ids = tuple(map(str, edge_ids))
    if sorted(edge_ids, key=natural_key) != [edge.id for edge in network.edges]:
        raise ValidationException("Edge sequence must list every edge exactly once")
    position = {edge_id: index for index, edge_id in enumerate(edge_ids)}
    for before, after in _edge_precedence(network).edges():
        if position[before] > position[after]:
            raise ValidationException(
                f"Edge '{before}' lies on a path into '{after}' but is ranked after it"
            )
    return EdgeOrder(network=network, sequence=edge_ids)


def edge_order_extensions(network: Network, limit: Optional[int] = None) -> Iterator[EdgeOrder]:
    """Enumerate legal edge orders (all linear extensions of the path order)."""
    sorts = nx.all_topological_sorts(_edge_precedence(network))
    for sequence in itertools.islice(sorts, limit):
        yield EdgeOrder(network=network, sequence=tuple(sequence))


def _flow_graph(network: Network) -> nx.DiGraph:
    """Collapse parallel edges into unit capacities summed per vertex pair."""
    flow_graph = nx.DiGraph()
    flow_graph.add_nodes_from(network.vertices)
    for edge in network.edges:
        if flow_graph.has_edge(edge.tail, edge.head):
            flow_graph[edge.tail][edge.head]['capacity'] += 1
        else:
            flow_graph.add_edge(edge.tail, edge.head, capacity=1)
    return flow_graph


def _require_terminal(network: Network, terminal: str):
    if terminal not in network.terminals:
        raise NotFoundException(f"'{terminal}' is not a terminal of {network}")


def min_cut(network: Network, terminal: str) -> CutValue:
    """Maximum number of edge-disjoint source-terminal paths (unit-capacity max-flow)."""
    _require_terminal(network, terminal)
    value = nx.maximum_flow_value(
        _flow_graph(network), network.source, terminal, flow_func=edmonds_karp
    )
    return CutValue(int(value))


def min_cut_edges(network: Network, terminal: str) -> frozenset:
    """Edge ids of one minimum cut separating the source from ``terminal``."""
    _require_terminal(network, terminal)
    _, (source_side, _) = nx.minimum_cut(
        _flow_graph(network), network.source, terminal, flow_func=edmonds_karp
    )
    return frozenset(
        edge.id for edge in network.edges
        if edge.tail in source_side and edge.head not in source_side
    )


def mu(network: Network) -> CutValue:
    """Minimum over all terminals of the min-cut."""
    return min(min_cut(network, terminal) for terminal in network.terminals)


def _fresh_id(base: str, taken) -> str:
    candidate = base
    while candidate in taken:
        candidate += "'"
    return candidate


def add_supersource(network: Network) -> Network:
    """
    Prepend a new source joined to the old one by mu parallel edges.

    The old source becomes an intermediate vertex whose function plays the
    role of the outer code; mu is unchanged.
    """
    width = mu(network).value
    new_source = _fresh_id(f"{network.source}'", network.vertices)
    taken = {edge.id for edge in network.edges}
    new_edges = []
    for index in range(1, width + 1):
        edge_id = _fresh_id(f"e'{index}", taken)
        taken.add(edge_id)
        new_edges.append([edge_id, new_source, network.source])

    candidate = serialize_network(network)
    candidate['vertices'].append(new_source)
    candidate['edges'] = new_edges + candidate['edges']
    candidate['source'] = new_source
    logger.debug(f"Added supersource {new_source} with {width} edges to {network}")
    return validate_network(candidate, name=f"{network.name or 'network'}+supersource")


def routing_fixable_vertices(network: Network) -> frozenset:
    """Intermediate vertices with exactly one incoming edge."""
    return frozenset(
        vertex for vertex in network.intermediates
        if len(network.in_edge_ids(vertex)) == 1
    )


def combination_network(n: int, k: int) -> Network:
    """
    The (n choose k) combination network.

    Source S feeds middle vertices V1..Vn; one terminal per k-subset receives
    one edge from each middle vertex of its subset.
    """
    if not (isinstance(n, int) and isinstance(k, int)) or not n >= k >= 1:
        raise ValidationException(f"Combination network needs n >= k >= 1, got ({n},{k})")

    middles = [f"V{i}" for i in range(1, n + 1)]
    edges = [[f"e{i}", 'S', middle] for i, middle in enumerate(middles, start=1)]
    terminals = []
    for subset in itertools.combinations(range(1, n + 1), k):
        terminal = 'T' + '_'.join(map(str, subset))
        terminals.append(terminal)
        for i in subset:
            edges.append([f"e{len(edges) + 1}", f"V{i}", terminal])

    return validate_network(
        {'vertices': ['S'] + middles + terminals, 'edges': edges,
         'source': 'S', 'terminals': terminals},
        name=f"combination_{n}_{k}",
    )


_COMBINATION = re.compile(r'^combination\s*[:(]\s*(\d+)\s*,\s*(\d+)\s*\)?$')


def builtin_network(name: str) -> Network:
    """
    Load a built-in instance: ``butterfly``, ``fig3`` or ``combination:n,k``.

    Instances are read from the data directory; combination networks without
    a shipped file are constructed.
    """
    # Local import: the file format lives with the serializers.
    from .serializers import load_network_file

    data_dir = settings.NETWORKS_CONFIG['DATA_DIR']
    key = name.strip().lower()
    match = _COMBINATION.match(key)
    if match:
        n, k = int(match.group(1)), int(match.group(2))
        path = data_dir / f"combination_{n}_{k}.json"
        if path.exists():
            return load_network_file(path)
        return combination_network(n, k)

    if key in ('butterfly', 'fig3'):
        return load_network_file(data_dir / f"{key}.json")

    raise NotFoundException(
        f"Unknown built-in network '{name}' (expected butterfly, fig3 or combination:n,k)"
    )
