"""
Shared utility functions used across modules.
"""

import re
from typing import Iterable, Sequence, Tuple

_DIGITS = re.compile(r'(\d+)')


def natural_key(identifier: str) -> Tuple:
    """
    Sort key that orders embedded numbers numerically.

    ``e2`` sorts before ``e10``; ties between equal keys fall back to the raw string.

    Args:
        identifier: A vertex or edge id

    Returns:
        A tuple usable as a sort key
    """
    parts = _DIGITS.split(identifier)
    key = tuple((0, int(part)) if part.isdigit() else (1, part) for part in parts if part)
    return key + ((2, identifier),)


def encode_tuple(symbols: Sequence[int], q: int) -> int:
    """
    Mixed-radix encoding of a symbol tuple, first position most significant.

    Args:
        symbols: Symbols in 0..q-1
        q: Alphabet size

    Returns:
        The integer index of the tuple
    """
    index = 0
    for symbol in symbols:
        index = index * q + symbol
    return index


def decode_index(index: int, q: int, length: int) -> Tuple[int, ...]:
    """
    Inverse of :func:`encode_tuple`.

    Args:
        index: Integer in 0..q**length - 1
        q: Alphabet size
        length: Tuple length

    Returns:
        The symbol tuple
    """
    symbols = [0] * length
    for position in range(length - 1, -1, -1):
        index, symbols[position] = divmod(index, q)
    return tuple(symbols)


def all_tuples(q: int, length: int) -> Iterable[Tuple[int, ...]]:
    """Yield every tuple of the given length in mixed-radix order."""
    for index in range(q ** length):
        yield decode_index(index, q, length)


def flatten_errors(errors, prefix=''):
    """
    Turn a DRF ``serializer.errors`` structure into 'field: message' lines.

    Args:
        errors: Nested dict/list of error details
        prefix: Field path accumulated so far

    Returns:
        List of diagnostic strings
    """
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            if key == 'non_field_errors':
                label = prefix
            elif isinstance(key, int):
                label = f"{prefix}[{key}]"
            else:
                label = f"{prefix}.{key}" if prefix else str(key)
            lines.extend(flatten_errors(value, label))
    elif isinstance(errors, (list, tuple)):
        for item in errors:
            lines.extend(flatten_errors(item, prefix))
    else:
        lines.append(f"{prefix}: {errors}" if prefix else str(errors))
    return lines
