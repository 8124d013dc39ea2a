"""Exact arithmetic in a prime field F_q.

A :class:`PrimeField` is an immutable context holding a verified prime
modulus.  Elements are plain Python ints reduced into ``[0, q)``; the
:class:`FieldElement` wrapper adds operator syntax and context checking
for scalar work.  Matrix code operates on raw ints through the field's
methods, which keeps the hot paths allocation-free.

The modulus is runtime-configurable so the same code serves both the
exhaustive leakage audit (tiny fields, q = 2 or 3) and production jobs
(large primes with headroom for 128-bit intermediate products).
"""

from __future__ import annotations

import random
from typing import Iterator, Optional

from .errors import FieldMismatchError

# Witnesses making Miller-Rabin deterministic for all n < 3.317e24
# (covers every modulus the wire format can carry).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality check for n < 3.317e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _largest_prime_below(bound: int) -> int:
    n = bound - 1
    if n % 2 == 0:
        n -= 1
    while not is_prime(n):
        n -= 2
    return n


# Largest prime below 2^62: products of two reduced elements fit in
# 124 bits, well inside Python's arbitrary precision but also inside
# anything a future fixed-width backend would use.
DEFAULT_MODULUS = _largest_prime_below(1 << 62)


class PrimeField:
    """The arithmetic context F_q for a verified prime modulus q."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int = DEFAULT_MODULUS):
        if not is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(("PrimeField", self.modulus))

    def __repr__(self) -> str:
        return f"PrimeField({self.modulus})"

    # -- raw-int arithmetic (operands assumed reduced) ------------------

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def inv(self, a: int) -> int:
        """Multiplicative inverse; a must be nonzero."""
        if a % self.modulus == 0:
            raise ZeroDivisionError("0 has no inverse")
        # Fermat: a^(q-2) = a^(-1) for prime q.
        return pow(a, self.modulus - 2, self.modulus)

    def pow(self, a: int, e: int) -> int:
        """a^e by square-and-multiply; e must be >= 0 (0^0 = 1)."""
        if e < 0:
            raise ValueError("exponent must be non-negative")
        return pow(a, e, self.modulus)

    def coerce(self, x) -> int:
        """Accept an int or a FieldElement of this field; return a reduced int."""
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatchError(
                    f"element of {x.field!r} used in {self!r}"
                )
            return x.value
        return int(x) % self.modulus

    def sample_uniform(self, rng) -> int:
        """Uniform element of [0, q) by rejection sampling (no modulo bias).

        ``rng`` needs only ``getrandbits``; both ``random.Random`` and
        ``random.SystemRandom`` qualify.
        """
        bits = self.modulus.bit_length()
        while True:
            v = rng.getrandbits(bits)
            if v < self.modulus:
                return v

    # -- element constructors -------------------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterator[int]:
        """All raw element values, for exhaustive enumeration over tiny q."""
        return iter(range(self.modulus))


class FieldElement:
    """An element of a specific PrimeField, with operator syntax.

    Mixing elements of different fields raises FieldMismatchError.
    """

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "value", int(value) % field.modulus)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"cannot combine elements of {self.field!r} and {other.field!r}"
                )
            return other.value
        if isinstance(other, int):
            return other % self.field.modulus
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - v, self.field)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(v - self.value, self.field)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * v, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * self.field.inv(v), self.field)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.modulus))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement({self.value} mod {self.field.modulus})"


def default_points(field: PrimeField, n: int,
                   allow_repeated: bool = False) -> list[int]:
    """The canonical evaluation points x_i = i for i = 1..n.

    Requires q > n so that n distinct nonzero points exist.  With
    ``allow_repeated`` the points cycle through the q-1 nonzero elements
    instead; such plans cannot decode but still encode securely, which
    is all the desk-scale leakage audit needs.
    """
    if field.modulus > n:
        return list(range(1, n + 1))
    if not allow_repeated:
        raise ValueError(
            f"field of size {field.modulus} has fewer than {n} distinct "
            "nonzero evaluation points"
        )
    return [(i % (field.modulus - 1)) + 1 for i in range(n)]


def smallest_prime_above(n: int) -> int:
    """The smallest prime strictly greater than n."""
    c = n + 1
    if c <= 2:
        return 2
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


def make_rng(seed: Optional[int] = None):
    """Seeded deterministic rng, or system entropy when seed is None."""
    if seed is None:
        return random.SystemRandom()
    return random.Random(seed)
