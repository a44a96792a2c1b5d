"""
Domain types for alphabets, network codes and certificates.

Function tables are dense numpy arrays: row ``i`` of the table of V is the
output tuple (positions in EdgeOrder of out(V)) for the input tuple whose
mixed-radix index is ``i`` (digits in EdgeOrder of in(V), first most
significant).
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from modules.networks.domain import EdgeOrder, Network
from shared.exceptions import AlphabetError, ArityMismatchError
from shared.utils import all_tuples, encode_tuple, natural_key


@dataclass(frozen=True)
class Alphabet:
    """Symbols 0..q-1, optionally with the arithmetic of GF(p**k)."""

    q: int
    p: Optional[int] = None
    k: Optional[int] = None
    modulus: Optional[Tuple[int, ...]] = None
    add_table: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    mul_table: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def is_field(self) -> bool:
        return self.add_table is not None

    def require_field(self):
        if not self.is_field:
            raise AlphabetError(f"Alphabet of size {self.q} has no field structure")

    def add(self, a: int, b: int) -> int:
        self.require_field()
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        self.require_field()
        return int(self.mul_table[a, b])

    def add_vectors(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Componentwise sum of two symbol arrays of equal shape."""
        self.require_field()
        return self.add_table[left, right]

    def apply_matrix(self, matrix: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """
        Multiply every row vector of ``vectors`` (N x n) by ``matrix`` (m x n).

        Returns:
            The N x m array of images
        """
        self.require_field()
        matrix = np.asarray(matrix, dtype=np.int64)
        vectors = np.asarray(vectors, dtype=np.int64)
        images = np.zeros((vectors.shape[0], matrix.shape[0]), dtype=np.int64)
        for row in range(matrix.shape[0]):
            acc = np.zeros(vectors.shape[0], dtype=np.int64)
            for column in range(matrix.shape[1]):
                acc = self.add_table[acc, self.mul_table[matrix[row, column], vectors[:, column]]]
            images[:, row] = acc
        return images

    def describe(self) -> dict:
        if not self.is_field:
            return {'q': self.q, 'field': False}
        return {'q': self.q, 'field': True, 'p': self.p, 'k': self.k, 'modulus': list(self.modulus)}

    def __str__(self):
        if self.is_field:
            return f"GF({self.q})"
        return f"A{self.q}"


def completion_row(in_arity: int, out_arity: int, inputs: Sequence[int]) -> Tuple[int, ...]:
    """Replication-or-zero: a single input is copied to every output, otherwise all zeros."""
    if in_arity == 1:
        return (inputs[0],) * out_arity
    return (0,) * out_arity


class NetworkCode:
    """
    Total function tables for every intermediate vertex of a network.

    The code remembers the EdgeOrder its tables were indexed with.
    """

    def __init__(self, order: EdgeOrder, q: int, tables: Mapping[str, np.ndarray]):
        network = order.network
        missing = network.intermediates - set(tables)
        extra = set(tables) - network.intermediates
        if missing:
            raise ArityMismatchError(
                f"Network code for {network} has no table for vertex '{min(missing, key=natural_key)}'"
            )
        if extra:
            raise ArityMismatchError(
                f"'{min(extra, key=natural_key)}' is not an intermediate vertex of {network}"
            )

        frozen = {}
        for vertex, table in tables.items():
            table = np.array(table, dtype=np.int64)
            shape = (q ** len(order.in_edges(vertex)), len(order.out_edges(vertex)))
            if table.shape != shape:
                raise ArityMismatchError(
                    f"Table of '{vertex}' has shape {table.shape}, expected {shape}"
                )
            if table.size and (table.min() < 0 or table.max() >= q):
                raise ArityMismatchError(f"Table of '{vertex}' uses symbols outside 0..{q - 1}")
            table.setflags(write=False)
            frozen[vertex] = table

        self.order = order
        self.q = q
        self.tables: Dict[str, np.ndarray] = frozen

    @property
    def network(self) -> Network:
        return self.order.network

    def apply(self, vertex: str, inputs: Sequence[int]) -> Tuple[int, ...]:
        """F_V applied to an input tuple given in EdgeOrder."""
        return tuple(self.tables[vertex][encode_tuple(inputs, self.q)].tolist())

    def __eq__(self, other):
        if not isinstance(other, NetworkCode):
            return NotImplemented
        return (
            self.q == other.q
            and self.order.sequence == other.order.sequence
            and self.network == other.network
            and all(np.array_equal(self.tables[v], other.tables[v]) for v in self.tables)
        )

    __hash__ = None

    def __repr__(self):
        return f"NetworkCode(q={self.q}, vertices={sorted(self.tables)})"

    # Constructors

    @classmethod
    def from_functions(
        cls, order: EdgeOrder, q: int, functions: Mapping[str, Callable[[Tuple[int, ...]], Sequence[int]]]
    ) -> 'NetworkCode':
        """
        Tabulate per-vertex callables taking and returning tuples.

        Vertices without a callable get the replication-or-zero completion.
        """
        tables = {}
        for vertex in order.network.intermediates:
            n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
            function = functions.get(vertex)
            rows = []
            for inputs in all_tuples(q, n_in):
                outputs = completion_row(n_in, n_out, inputs) if function is None else function(inputs)
                rows.append([int(symbol) % q for symbol in outputs])
            tables[vertex] = np.array(rows, dtype=np.int64).reshape(q ** n_in, n_out)
        return cls(order, q, tables)

    @classmethod
    def from_edge_functions(
        cls, order: EdgeOrder, q: int, edge_functions: Mapping[str, Callable[..., int]]
    ) -> 'NetworkCode':
        """
        Tabulate one callable per outgoing edge, called with the symbols of in(tail).

        Edges without a callable follow the completion rule of their tail.
        """
        network = order.network
        functions = {}
        for vertex in network.intermediates:
            out_edges = order.out_edges(vertex)
            if not any(edge_id in edge_functions for edge_id in out_edges):
                continue

            def function(inputs, out_edges=out_edges):
                default = completion_row(len(inputs), len(out_edges), inputs)
                return tuple(
                    edge_functions[edge_id](*inputs) if edge_id in edge_functions else default[i]
                    for i, edge_id in enumerate(out_edges)
                )

            functions[vertex] = function
        return cls.from_functions(order, q, functions)

    @classmethod
    def from_matrices(cls, order: EdgeOrder, alphabet: Alphabet, matrices: Mapping[str, Sequence]) -> 'NetworkCode':
        """
        Linear code x -> M_V x over a field alphabet.

        ``matrices[V]`` is |out(V)| x |in(V)|; missing vertices replicate or emit zero.
        """
        alphabet.require_field()
        q = alphabet.q
        tables = {}
        for vertex in order.network.intermediates:
            n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
            if vertex in matrices:
                matrix = np.array(matrices[vertex], dtype=np.int64)
                if matrix.ndim == 1 and n_out == 1:
                    matrix = matrix.reshape(1, -1)
                if matrix.shape != (n_out, n_in):
                    raise ArityMismatchError(
                        f"Matrix of '{vertex}' must be {n_out}x{n_in}"
                    )
            else:
                matrix = np.ones((n_out, 1), dtype=np.int64) if n_in == 1 else np.zeros((n_out, n_in), dtype=np.int64)
            inputs = np.array(list(all_tuples(q, n_in)), dtype=np.int64).reshape(q ** n_in, n_in)
            tables[vertex] = alphabet.apply_matrix(matrix, inputs)
        return cls(order, q, tables)

    @classmethod
    def completed(cls, order: EdgeOrder, q: int, entries: Mapping[str, Mapping[int, Sequence[int]]]) -> 'NetworkCode':
        """Build from partial tables {V: {input index: outputs}}, completing the rest."""
        tables = {}
        for vertex in order.network.intermediates:
            n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
            known = entries.get(vertex, {})
            rows = [
                known[index] if index in known else completion_row(n_in, n_out, inputs)
                for index, inputs in enumerate(all_tuples(q, n_in))
            ]
            tables[vertex] = np.array(rows, dtype=np.int64).reshape(q ** n_in, n_out)
        return cls(order, q, tables)


@dataclass(frozen=True)
class OuterCode:
    """Codewords in the order they were given; positions follow out(S) in EdgeOrder."""

    codewords: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def without(self, index: int) -> 'OuterCode':
        """The code with one codeword deleted."""
        return OuterCode(self.codewords[:index] + self.codewords[index + 1:])


@dataclass(frozen=True)
class Transcript:
    """Symbol carried by every edge for one codeword."""

    order: EdgeOrder = field(repr=False, compare=False)
    symbols: Mapping[str, int]

    def incoming(self, vertex: str) -> Tuple[int, ...]:
        """Symbols on in(V) in EdgeOrder; for a terminal this is the channel output."""
        return tuple(self.symbols[edge_id] for edge_id in self.order.in_edges(vertex))


@dataclass(frozen=True)
class Witness:
    """Two codewords that a terminal cannot tell apart."""

    terminal: str
    codeword: Tuple[int, ...]
    other: Tuple[int, ...]
    output: Tuple[int, ...]

    def __str__(self):
        return f"{self.terminal} receives {self.output} for both {self.codeword} and {self.other}"


@dataclass(frozen=True)
class UnambiguityReport:
    unambiguous: bool
    witness: Optional[Witness] = None
    reason: str = ''

    def __bool__(self):
        return self.unambiguous


@dataclass(frozen=True)
class CapacityValue:
    """log_q of an exact code size."""

    code_size: int
    q: int

    @property
    def value(self) -> float:
        exponent = round(math.log(self.code_size, self.q))
        if self.q ** exponent == self.code_size:
            return float(exponent)
        return math.log(self.code_size) / math.log(self.q)

    def __float__(self):
        return self.value

    def __str__(self):
        return f"log_{self.q} {self.code_size} = {self.value:.4f}"


@dataclass(frozen=True, eq=False)
class Certificate:
    """An outer code and a network code, re-checkable by simulation."""

    alphabet: Alphabet
    outer_code: OuterCode
    network_code: NetworkCode

    @property
    def network(self) -> Network:
        return self.network_code.network

    @property
    def size(self) -> int:
        return len(self.outer_code)
