"""
Business logic services for alphabets, channels and unambiguity.

These functions are the semantic ground truth: every result of the search
engine and every decoded model solution is re-checked here.
"""

import logging
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings

from modules.networks.domain import EdgeOrder, Network
from modules.networks.services import extend_edge_order, mu
from shared.exceptions import AlphabetError, ArityMismatchError, BoundViolationError, OuterCodeError
from shared.utils import all_tuples
from .domain import Alphabet, CapacityValue, NetworkCode, OuterCode, Transcript, UnambiguityReport, Witness
from .fields import build_tables, find_modulus, prime_power

logger = logging.getLogger(__name__)


def make_alphabet(q: int, want_field: bool = False) -> Alphabet:
    """
    Plain alphabet of size q, or GF(q) with the configured modulus.

    Raises:
        AlphabetError: q < 2, or a field is requested for a non prime power
    """
    if not isinstance(q, int) or q < 2:
        raise AlphabetError(f"Alphabet size must be an integer >= 2, got {q}")
    if not want_field:
        return Alphabet(q=q)

    factors = prime_power(q)
    if factors is None:
        raise AlphabetError(f"{q} is not a prime power; no field of that size exists")
    p, k = factors
    if k == 1:
        modulus = (0, 1)
    else:
        configured = settings.CODING_CONFIG.get('FIELD_MODULI', {})
        modulus = tuple(configured.get(q) or find_modulus(p, k))
    return _field_alphabet(q, p, k, modulus)


@lru_cache(maxsize=None)
def _field_alphabet(q: int, p: int, k: int, modulus: Tuple[int, ...]) -> Alphabet:
    add_table, mul_table = build_tables(p, k, modulus)
    logger.debug(f"Built GF({q}) with modulus {modulus}")
    return Alphabet(q=q, p=p, k=k, modulus=modulus, add_table=add_table, mul_table=mul_table)


def alphabet_from_description(description: Mapping) -> Alphabet:
    """Rebuild an alphabet from ``Alphabet.describe()`` output."""
    q = int(description['q'])
    if not description.get('field'):
        return make_alphabet(q)
    modulus = description.get('modulus')
    alphabet = make_alphabet(q, True)
    if modulus is not None and tuple(modulus) != alphabet.modulus:
        p, k = alphabet.p, alphabet.k
        add_table, mul_table = build_tables(p, k, tuple(modulus))
        alphabet = Alphabet(q=q, p=p, k=k, modulus=tuple(modulus), add_table=add_table, mul_table=mul_table)
    return alphabet


def replication_code(network: Network, q: int, order: Optional[EdgeOrder] = None) -> NetworkCode:
    """Routing code: every vertex with one input copies it, the others emit zeros."""
    return NetworkCode.completed(order or extend_edge_order(network), q, {})


def constant_code(network: Network, q: int, symbol: int = 0, order: Optional[EdgeOrder] = None) -> NetworkCode:
    """Every vertex emits ``symbol`` on every outgoing edge, whatever it receives."""
    order = order or extend_edge_order(network)
    return NetworkCode.from_functions(
        order, q,
        {vertex: (lambda inputs, n=len(order.out_edges(vertex)): (symbol,) * n)
         for vertex in network.intermediates},
    )


def make_outer_code(network: Network, q: int, codewords: Iterable[Sequence[int]]) -> OuterCode:
    """
    Validate and wrap codewords.

    Raises:
        OuterCodeError: empty code, wrong length, symbols out of range or repeats
    """
    width = len(network.out_edge_ids(network.source))
    words = tuple(tuple(int(symbol) for symbol in word) for word in codewords)
    if not words:
        raise OuterCodeError("Outer code must contain at least one codeword")
    seen = set()
    for word in words:
        if len(word) != width:
            raise OuterCodeError(f"Codeword {word} has length {len(word)}, expected |out(S)| = {width}")
        if any(not 0 <= symbol < q for symbol in word):
            raise OuterCodeError(f"Codeword {word} uses symbols outside 0..{q - 1}")
        if word in seen:
            raise OuterCodeError(f"Codeword {word} appears twice")
        seen.add(word)
    return OuterCode(words)


def full_outer_code(network: Network, q: int) -> OuterCode:
    """All q**|out(S)| codewords in mixed-radix order."""
    return OuterCode(tuple(all_tuples(q, len(network.out_edge_ids(network.source)))))


def _check_fit(network: Network, code: NetworkCode):
    if code.network != network:
        raise ArityMismatchError(f"Network code was built for {code.network}, not {network}")


def transmit(network: Network, code: NetworkCode, codeword: Sequence[int]) -> Transcript:
    """
    Propagate one codeword through the network, edge by edge in EdgeOrder.

    Raises:
        ArityMismatchError: the code does not fit the network or the codeword has the wrong length
    """
    _check_fit(network, code)
    order = code.order
    source_edges = order.out_edges(network.source)
    if len(codeword) != len(source_edges):
        raise ArityMismatchError(
            f"Codeword {tuple(codeword)} has length {len(codeword)}, expected {len(source_edges)}"
        )

    symbols: Dict[str, int] = dict(zip(source_edges, (int(s) for s in codeword)))
    for edge_id in order.sequence:
        if edge_id in symbols:
            continue
        tail = network.edge_map[edge_id].tail
        inputs = tuple(symbols[e] for e in order.in_edges(tail))
        symbols.update(zip(order.out_edges(tail), code.apply(tail, inputs)))
    return Transcript(order=order, symbols=symbols)


def channel_output(network: Network, code: NetworkCode, terminal: str, codeword: Sequence[int]) -> Tuple[int, ...]:
    """Omega[N, F, S -> T](codeword)."""
    return transmit(network, code, codeword).incoming(terminal)


def terminal_outputs(network: Network, code: NetworkCode, codewords: Sequence[Sequence[int]]) -> Dict[str, list]:
    """Channel output at every terminal for every codeword, in codeword order."""
    transcripts = [transmit(network, code, word) for word in codewords]
    return {
        terminal: [transcript.incoming(terminal) for transcript in transcripts]
        for terminal in network.sorted_vertices(network.terminals)
    }


def find_collision(outputs: Mapping[str, Sequence[tuple]], members: Iterable[int]) -> Optional[Tuple[str, int, int]]:
    """
    First terminal and pair of member indices with equal outputs.

    Terminals are scanned in the mapping's order, members in the given order.
    """
    members = list(members)
    for terminal, column in outputs.items():
        seen = {}
        for member in members:
            received = column[member]
            if received in seen:
                return terminal, seen[received], member
            seen[received] = member
    return None


@lru_cache(maxsize=256)
def code_size_bound(network: Network, q: int) -> int:
    """q ** mu(N), the largest size an unambiguous outer code can have."""
    return q ** mu(network).value


def assert_within_bound(network: Network, q: int, size: int):
    """
    Raises:
        BoundViolationError: when size exceeds q ** mu(N)
    """
    bound = code_size_bound(network, q)
    if size > bound:
        raise BoundViolationError(
            f"Unambiguous code of size {size} on {network} exceeds q^mu = {bound}"
        )


def is_unambiguous(network: Network, outer_code: OuterCode, code: NetworkCode) -> UnambiguityReport:
    """
    Check that every terminal can tell every pair of codewords apart.

    Returns:
        Report with a witness (terminal, codeword, other codeword) on failure
    """
    _check_fit(network, code)
    words = list(outer_code)
    outputs = terminal_outputs(network, code, words)
    collision = find_collision(outputs, range(len(words)))
    if collision is not None:
        terminal, first, second = collision
        witness = Witness(terminal, words[first], words[second], outputs[terminal][first])
        return UnambiguityReport(False, witness, str(witness))

    assert_within_bound(network, code.q, len(words))
    return UnambiguityReport(True)


def linear_matrices(code: NetworkCode, alphabet: Alphabet) -> Dict[str, np.ndarray]:
    """
    Reconstruct the matrix M_V of every vertex from its images of unit vectors.

    Raises:
        AlphabetError: the alphabet is not a field
        ArityMismatchError: the code and the alphabet disagree on q
        ValueError: some table is not x -> M_V x
    """
    alphabet.require_field()
    if alphabet.q != code.q:
        raise ArityMismatchError(f"Code over {code.q} symbols checked against {alphabet}")

    matrices = {}
    q = alphabet.q
    for vertex in code.network.sorted_vertices(code.tables):
        table = code.tables[vertex]
        n_in = len(code.order.in_edges(vertex))
        # Unit vector j has index q ** (n_in - 1 - j).
        matrix = np.stack([table[q ** (n_in - 1 - j)] for j in range(n_in)], axis=1)
        inputs = np.array(list(all_tuples(q, n_in)), dtype=np.int64)
        if not np.array_equal(alphabet.apply_matrix(matrix, inputs), table):
            raise ValueError(f"Function of '{vertex}' is not linear over {alphabet}")
        matrices[vertex] = matrix
    return matrices


def is_linear(code: NetworkCode, alphabet: Alphabet) -> bool:
    """
    Raises:
        AlphabetError: the alphabet has no field structure
    """
    alphabet.require_field()
    try:
        linear_matrices(code, alphabet)
    except ValueError:
        return False
    return True


def capacity_value(code_size: int, q: int) -> CapacityValue:
    if code_size < 1 or q < 2:
        raise AlphabetError(f"Capacity needs code_size >= 1 and q >= 2, got ({code_size}, {q})")
    return CapacityValue(code_size, q)


def reindex_code(code: NetworkCode, target_order: EdgeOrder) -> NetworkCode:
    """
    The same vertex functions, tabulated under another edge order.

    Every intermediate vertex of the target network must be an intermediate
    of the code's network with the same incident edges; only tuple positions
    are permuted.

    Raises:
        ArityMismatchError: some target vertex has no counterpart in the code
    """
    source_order = code.order
    functions = {}
    for vertex in target_order.network.intermediates:
        if vertex not in code.tables:
            raise ArityMismatchError(f"Network code has no table for vertex '{vertex}'")
        target_in, target_out = target_order.in_edges(vertex), target_order.out_edges(vertex)
        source_in, source_out = source_order.in_edges(vertex), source_order.out_edges(vertex)
        if set(target_in) != set(source_in) or set(target_out) != set(source_out):
            raise ArityMismatchError(f"Vertex '{vertex}' has different incident edges in the two networks")
        pick_in = [target_in.index(e) for e in source_in]
        pick_out = [source_out.index(e) for e in target_out]

        def function(inputs, vertex=vertex, pick_in=pick_in, pick_out=pick_out):
            outputs = code.apply(vertex, tuple(inputs[i] for i in pick_in))
            return tuple(outputs[i] for i in pick_out)

        functions[vertex] = function
    return NetworkCode.from_functions(target_order, code.q, functions)
