"""
Small finite fields as lookup tables.

Element ``x`` of GF(p**k) is the polynomial whose coefficients are the base-p
digits of ``x``, lowest degree first; so in GF(4) = GF(2)[a]/(a^2+a+1) the
element ``a`` is 2 and ``a + 1`` is 3.
"""

import itertools
from typing import Optional, Sequence, Tuple

import numpy as np

from shared.exceptions import AlphabetError


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """Return (p, k) with q == p**k and p prime, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k, rest = 0, q
            while rest % p == 0:
                rest //= p
                k += 1
            return (p, k) if rest == 1 else None
    return None


def _poly_mod(poly: Sequence[int], modulus: Sequence[int], p: int) -> list:
    """Remainder of ``poly`` modulo a monic ``modulus`` over GF(p)."""
    poly = list(poly)
    degree = len(modulus) - 1
    for top in range(len(poly) - 1, degree - 1, -1):
        factor = poly[top] % p
        if factor:
            shift = top - degree
            for i, coeff in enumerate(modulus):
                poly[shift + i] = (poly[shift + i] - factor * coeff) % p
    return [c % p for c in poly[:degree]] + [0] * max(0, degree - len(poly))


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    degree = len(modulus) - 1
    for d in range(1, degree // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_poly_mod(modulus, divisor, p)):
                return False
    return True


def find_modulus(p: int, k: int) -> Tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree k."""
    for low in itertools.product(range(p), repeat=k):
        modulus = tuple(low) + (1,)
        if is_irreducible(modulus, p):
            return modulus
    raise AlphabetError(f"No irreducible polynomial of degree {k} over GF({p})")


def build_tables(p: int, k: int, modulus: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Addition and multiplication tables of GF(p**k).

    Raises:
        AlphabetError: if the modulus is not monic of degree k or is reducible
    """
    if len(modulus) != k + 1 or modulus[-1] != 1:
        raise AlphabetError(f"Modulus {tuple(modulus)} is not monic of degree {k}")
    if k > 1 and not is_irreducible(modulus, p):
        raise AlphabetError(f"Modulus {tuple(modulus)} is reducible over GF({p})")

    q = p ** k
    weights = p ** np.arange(k)
    digits = (np.arange(q)[:, None] // weights[None, :]) % p

    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights

    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(a, q):
            product = np.convolve(digits[a], digits[b]) % p
            reduced = _poly_mod(product, modulus, p)
            mul[a, b] = mul[b, a] = int(np.dot(reduced, weights))

    add = add.astype(np.int64)
    add.setflags(write=False)
    mul.setflags(write=False)
    return add, mul
