"""
Exact depth-first search for unambiguous pairs.

The search works directly on source emissions and function-table entries.
Codewords are chosen one at a time (in strictly increasing mixed-radix order
when symmetry breaking is on) and pushed through the network vertex by
vertex. A table entry, or a matrix column in linear mode, is branched on the
first time some codeword needs it. Two codewords reaching a terminal with
the same input tuple is a conflict and the branch is abandoned.
"""

import itertools
import logging
import multiprocessing
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from modules.coding.domain import Alphabet, Certificate, NetworkCode, OuterCode
from modules.networks.domain import EdgeOrder, Network
from modules.networks.services import routing_fixable_vertices
from shared.utils import decode_index, encode_tuple, natural_key
from .domain import SearchOptions, Status

logger = logging.getLogger(__name__)


class SearchTimeout(Exception):
    """The deadline passed."""


class SearchStopped(Exception):
    """Another worker already found a solution."""


@dataclass(frozen=True)
class EngineConfig:
    node_check_interval: int = 4096
    deadline: Optional[float] = None


@dataclass(frozen=True)
class RawSolution:
    """Plain-data solution, safe to send between processes."""

    words: Tuple[int, ...]
    entries: Dict[str, Dict[Tuple[int, ...], Tuple[int, ...]]]
    columns: Dict[str, List[Optional[Tuple[int, ...]]]]


def vertex_schedule(network: Network) -> Tuple[str, ...]:
    """Topological order of all vertices; terminals come as early as possible."""
    terminals = network.terminals
    return tuple(nx.lexicographical_topological_sort(
        network.graph,
        key=lambda vertex: (vertex not in terminals, natural_key(vertex)),
    ))


class SearchEngine:
    """
    One exhaustive search for an unambiguous pair of a given size.

    ``prefix`` forces the first codewords (mixed-radix indices); used to
    split the search tree between workers.
    """

    def __init__(
        self,
        network: Network,
        order: EdgeOrder,
        alphabet: Alphabet,
        code_size: int,
        options: SearchOptions,
        config: EngineConfig = EngineConfig(),
        prefix: Sequence[int] = (),
        stop_event=None,
    ):
        self.network = network
        self.order = order
        self.alphabet = alphabet
        self.q = alphabet.q
        self.code_size = code_size
        self.options = options
        self.config = config
        self.prefix = tuple(prefix)
        self.stop_event = stop_event

        self.source_edges = order.out_edges(network.source)
        self.width = len(self.source_edges)
        self.total = self.q ** self.width
        self.schedule = tuple(v for v in vertex_schedule(network) if v != network.source)
        self.in_edges = {v: order.in_edges(v) for v in network.vertices}
        self.out_edges = {v: order.out_edges(v) for v in network.vertices}
        self.terminals = network.terminals
        self.fixed = routing_fixable_vertices(network) if options.routing_fix else frozenset()

        self.linear = options.linear_only
        if self.linear:
            alphabet.require_field()
            self.add = alphabet.add_table.tolist()
            self.mul = alphabet.mul_table.tolist()
        self.ordered_words = options.symmetry_break
        self.pin_first = options.symmetry_break and not self.linear
        self.precedence = options.symmetry_break and not self.linear
        free = network.intermediates - self.fixed
        self.max_symbol = {e: -1 for v in free for e in self.out_edges[v]}

        self.words: List[Optional[int]] = [None] * code_size
        self.symbols: List[Dict[str, int]] = [{} for _ in range(code_size)]
        self.seen = {t: {} for t in network.terminals}
        self.entries = {v: {} for v in network.intermediates}
        self.columns = {v: [None] * len(self.in_edges[v]) for v in network.intermediates}
        self.nodes = 0

    def run(self) -> Optional[RawSolution]:
        """
        Raises:
            SearchTimeout: the deadline passed
            SearchStopped: the stop event was set
        """
        needed = self.code_size * (len(self.schedule) + 2) + 200
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)
        if not self._codeword(0):
            return None
        return RawSolution(
            words=tuple(self.words),
            entries={v: dict(table) for v, table in self.entries.items()},
            columns={v: list(cols) for v, cols in self.columns.items()},
        )

    def _tick(self):
        self.nodes += 1
        if self.nodes % self.config.node_check_interval == 0:
            if self.config.deadline is not None and time.time() > self.config.deadline:
                raise SearchTimeout()
            if self.stop_event is not None and self.stop_event.is_set():
                raise SearchStopped()

    def _candidates(self, c: int):
        if c < len(self.prefix):
            return (self.prefix[c],)
        if not self.ordered_words:
            used = set(self.words[:c])
            return (value for value in range(self.total) if value not in used)
        if c == 0:
            return (0,) if self.pin_first else range(0, self.total - self.code_size + 1)
        return range(self.words[c - 1] + 1, self.total - (self.code_size - c) + 1)

    def _codeword(self, c: int) -> bool:
        if c == self.code_size:
            return True
        symbols = self.symbols[c]
        for value in self._candidates(c):
            self._tick()
            self.words[c] = value
            symbols.clear()
            symbols.update(zip(self.source_edges, decode_index(value, self.q, self.width)))
            if self._step(c, 0):
                return True
        self.words[c] = None
        return False

    def _step(self, c: int, step: int) -> bool:
        """Propagate codeword c from schedule position ``step``; branch where needed."""
        symbols = self.symbols[c]
        added = []
        try:
            while step < len(self.schedule):
                vertex = self.schedule[step]
                inputs = tuple(symbols[e] for e in self.in_edges[vertex])
                if vertex in self.terminals:
                    seen = self.seen[vertex]
                    if inputs in seen:
                        return False
                    seen[inputs] = c
                    added.append((seen, inputs))
                    step += 1
                    continue

                if vertex in self.fixed:
                    outputs = (inputs[0],) * len(self.out_edges[vertex])
                elif self.linear:
                    columns = self.columns[vertex]
                    missing = [j for j, x in enumerate(inputs) if x and columns[j] is None]
                    if missing:
                        return self._branch_column(c, step, vertex, missing[0])
                    outputs = self._matvec(vertex, inputs)
                else:
                    outputs = self.entries[vertex].get(inputs)
                    if outputs is None:
                        return self._branch_entry(c, step, vertex, inputs)

                symbols.update(zip(self.out_edges[vertex], outputs))
                step += 1
            return self._codeword(c + 1)
        finally:
            for seen, inputs in added:
                del seen[inputs]

    def _branch_entry(self, c: int, step: int, vertex: str, inputs: Tuple[int, ...]) -> bool:
        table = self.entries[vertex]
        out_edges = self.out_edges[vertex]
        if self.precedence:
            saved = [self.max_symbol[e] for e in out_edges]
            ranges = [range(min(self.q, bound + 2)) for bound in saved]
        else:
            ranges = [range(self.q)] * len(out_edges)

        for outputs in itertools.product(*ranges):
            self._tick()
            table[inputs] = outputs
            if self.precedence:
                for e, symbol, bound in zip(out_edges, outputs, saved):
                    self.max_symbol[e] = max(bound, symbol)
            if self._step(c, step):
                return True
            if self.precedence:
                for e, bound in zip(out_edges, saved):
                    self.max_symbol[e] = bound
        del table[inputs]
        return False

    def _branch_column(self, c: int, step: int, vertex: str, column: int) -> bool:
        columns = self.columns[vertex]
        for value in itertools.product(range(self.q), repeat=len(self.out_edges[vertex])):
            self._tick()
            columns[column] = value
            if self._step(c, step):
                return True
        columns[column] = None
        return False

    def _matvec(self, vertex: str, inputs: Tuple[int, ...]) -> Tuple[int, ...]:
        add, mul = self.add, self.mul
        outputs = [0] * len(self.out_edges[vertex])
        for x, column in zip(inputs, self.columns[vertex]):
            if x:
                for k, entry in enumerate(column):
                    outputs[k] = add[outputs[k]][mul[entry][x]]
        return tuple(outputs)


def build_certificate(
    network: Network, order: EdgeOrder, alphabet: Alphabet, raw: RawSolution, options: SearchOptions
) -> Certificate:
    """Turn a raw solution into a complete certificate."""
    q = alphabet.q
    width = len(order.out_edges(network.source))
    outer = OuterCode(tuple(decode_index(word, q, width) for word in raw.words))
    fixed = routing_fixable_vertices(network) if options.routing_fix else frozenset()

    if options.linear_only:
        matrices = {}
        for vertex in network.intermediates - fixed:
            n_out = len(order.out_edges(vertex))
            columns = [column or (0,) * n_out for column in raw.columns[vertex]]
            matrices[vertex] = [[column[k] for column in columns] for k in range(n_out)]
        code = NetworkCode.from_matrices(order, alphabet, matrices)
    else:
        entries = {
            vertex: {encode_tuple(inputs, q): outputs for inputs, outputs in table.items()}
            for vertex, table in raw.entries.items()
        }
        code = NetworkCode.completed(order, q, entries)
    return Certificate(alphabet=alphabet, outer_code=outer, network_code=code)


def split_prefixes(total: int, code_size: int, options: SearchOptions) -> List[Tuple[int, ...]]:
    """Subtrees for parallel search, split on the first free codeword."""
    if not options.symmetry_break:
        return [(value,) for value in range(total)]
    if options.linear_only:
        return [(value,) for value in range(total - code_size + 1)]
    if code_size == 1:
        return [(0,)]
    return [(0, value) for value in range(1, total - code_size + 2)]


_STOP_EVENT = None


def _init_worker(stop_event):
    global _STOP_EVENT
    _STOP_EVENT = stop_event


def _run_subtree(job):
    network, sequence, alphabet, code_size, options, config, prefix = job
    order = EdgeOrder(network=network, sequence=sequence)
    engine = SearchEngine(network, order, alphabet, code_size, options, config, prefix, _STOP_EVENT)
    try:
        raw = engine.run()
    except SearchTimeout:
        return Status.TIMEOUT, None, engine.nodes
    except SearchStopped:
        return None, None, engine.nodes
    if raw is None:
        return Status.INFEASIBLE, None, engine.nodes
    return Status.FEASIBLE, raw, engine.nodes


def run_search(
    network: Network,
    order: EdgeOrder,
    alphabet: Alphabet,
    code_size: int,
    options: SearchOptions,
    config: EngineConfig,
) -> Tuple[Status, Optional[RawSolution], int]:
    """
    Run one decision search, splitting it over ``options.workers`` processes.

    Returns:
        (status, raw solution or None, nodes explored)
    """
    if options.workers <= 1:
        engine = SearchEngine(network, order, alphabet, code_size, options, config)
        try:
            raw = engine.run()
        except SearchTimeout:
            return Status.TIMEOUT, None, engine.nodes
        status = Status.FEASIBLE if raw is not None else Status.INFEASIBLE
        return status, raw, engine.nodes

    total = alphabet.q ** len(order.out_edges(network.source))
    prefixes = split_prefixes(total, code_size, options)
    logger.debug(f"Splitting search into {len(prefixes)} subtrees over {options.workers} workers")

    context = multiprocessing.get_context()
    stop_event = context.Event()
    jobs = [(network, order.sequence, alphabet, code_size, options, config, prefix) for prefix in prefixes]
    nodes, timed_out, winner = 0, False, None
    with ProcessPoolExecutor(
        max_workers=options.workers, mp_context=context,
        initializer=_init_worker, initargs=(stop_event,),
    ) as executor:
        futures = [executor.submit(_run_subtree, job) for job in jobs]
        for future in futures:
            status, raw, count = future.result()
            nodes += count
            if status == Status.FEASIBLE:
                winner = raw
                stop_event.set()
                for pending in futures:
                    pending.cancel()
                break
            if status == Status.TIMEOUT:
                timed_out = True

    if winner is not None:
        return Status.FEASIBLE, winner, nodes
    return (Status.TIMEOUT if timed_out else Status.INFEASIBLE), None, nodes
