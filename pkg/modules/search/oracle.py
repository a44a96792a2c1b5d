"""
Brute-force oracle: every network code against every outer code of size M.

No pruning at all; only for tiny instances and for cross-checking the engine.
"""

import itertools
import logging
import math
from typing import Iterator, Optional

import numpy as np
from django.conf import settings

from modules.coding.domain import Alphabet, Certificate, NetworkCode, OuterCode
from modules.coding.services import find_collision, is_unambiguous, terminal_outputs
from modules.networks.domain import EdgeOrder, Network
from modules.networks.services import extend_edge_order
from shared.exceptions import InternalConsistencyError, OracleTooLargeError, ValidationException
from shared.utils import all_tuples
from .domain import OracleResult

logger = logging.getLogger(__name__)


def _table_choices(order: EdgeOrder, alphabet: Alphabet, vertex: str, linear: bool):
    """Every table of one vertex, as a list of rows."""
    q = alphabet.q
    n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
    if linear:
        inputs = np.array(list(all_tuples(q, n_in)), dtype=np.int64)
        for flat in itertools.product(range(q), repeat=n_in * n_out):
            matrix = np.array(flat, dtype=np.int64).reshape(n_out, n_in)
            yield alphabet.apply_matrix(matrix, inputs).tolist()
        return
    outputs = list(all_tuples(q, n_out))
    for choice in itertools.product(outputs, repeat=q ** n_in):
        yield [list(row) for row in choice]


def count_network_codes(network: Network, alphabet: Alphabet, linear: bool = False) -> int:
    q = alphabet.q
    order = extend_edge_order(network)
    count = 1
    for vertex in network.intermediates:
        n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
        count *= q ** (n_in * n_out) if linear else q ** (n_out * q ** n_in)
    return count


def _network_codes(order: EdgeOrder, alphabet: Alphabet, linear: bool) -> Iterator[NetworkCode]:
    vertices = order.network.sorted_vertices(order.network.intermediates)
    choices = [list(_table_choices(order, alphabet, v, linear)) for v in vertices]
    for combination in itertools.product(*choices):
        yield NetworkCode(order, alphabet.q, dict(zip(vertices, combination)))


def brute_force_oracle(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    linear: bool = False,
    max_checks: Optional[int] = None,
) -> OracleResult:
    """
    Decide by exhaustive enumeration whether an unambiguous pair of size M exists.

    Raises:
        ValidationException: M outside 1..q**|out(S)|
        OracleTooLargeError: the enumeration exceeds the check budget
    """
    q = alphabet.q
    order = extend_edge_order(network)
    width = len(order.out_edges(network.source))
    if not 1 <= code_size <= q ** width:
        raise ValidationException(f"Code size must lie in 1..{q ** width} (q^|out(S)|), got {code_size}")
    if linear:
        alphabet.require_field()

    budget = max_checks or settings.SEARCH_CONFIG.get('ORACLE_MAX_CHECKS', 10 ** 8)
    checks = count_network_codes(network, alphabet, linear) * math.comb(q ** width, code_size)
    if checks > budget:
        raise OracleTooLargeError(f"Oracle would need {checks} checks; the budget is {budget}")

    words = list(all_tuples(q, width))
    performed = 0
    for code in _network_codes(order, alphabet, linear):
        outputs = terminal_outputs(network, code, words)
        for members in itertools.combinations(range(len(words)), code_size):
            performed += 1
            if find_collision(outputs, members) is None:
                outer = OuterCode(tuple(words[i] for i in members))
                if not is_unambiguous(network, outer, code):
                    raise InternalConsistencyError("Oracle collision check disagrees with is_unambiguous")
                certificate = Certificate(alphabet=alphabet, outer_code=outer, network_code=code)
                return OracleResult(True, certificate, performed)
    logger.debug(f"Oracle exhausted {performed} checks on {network}")
    return OracleResult(False, None, performed)
