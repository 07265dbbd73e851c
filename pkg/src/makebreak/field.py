"""Prime-field scalars and prime generation on Python's native bigints.

Everything in this package works modulo a single prime p carried by a
FieldSpec. Residues are kept canonical in [0, p) at all times, so values
compare and serialize without sign juggling. Small moduli (p = 17, 19) run
through exactly the same code paths as 2000-bit ones; there is no
small-modulus fast path and no constant-time guarantee (this is an attack
tool, not a defense implementation).
"""

from __future__ import annotations

import random

MILLER_RABIN_ROUNDS = 40


class MismatchedField(ValueError):
    """Operands are bound to fields with different moduli."""


class ZeroInverse(ZeroDivisionError):
    """Multiplicative inverse requested for a non-invertible residue."""


class InvalidPrime(ValueError):
    """A value offered as the field modulus is not an acceptable prime."""


def _sieve(limit):
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit, i)))
    return [i for i in range(limit) if flags[i]]


# Trial-division pre-filter; verdicts are unchanged, composites just fail faster.
_SMALL_PRIMES = _sieve(1000)


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS, rng=None) -> bool:
    """Miller-Rabin primality test.

    A False answer is exact; a True answer is wrong with probability at most
    4**-rounds. Pass a seeded random.Random as rng to make the witness
    sequence (and hence any caller built on top) reproducible.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    n = int(n)
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    rand = rng if rng is not None else random
    # n - 1 = 2^r * d with d odd
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rand.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits: int, rng: random.Random) -> int:
    """Random probable prime with exactly `bits` bits (top bit set, odd).

    Deterministic given the rng state: candidates and Miller-Rabin witnesses
    are both drawn from the supplied stream.
    """
    if bits < 2:
        raise ValueError("need at least 2 bits for a prime")
    while True:
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand, MILLER_RABIN_ROUNDS, rng):
            return cand


def mod_inverse(a: int, p: int) -> int:
    """Inverse of a modulo p by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    r0, r1 = a, p
    s0, s1 = 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        # only reachable when p is composite
        raise ZeroInverse(f"{a} shares factor {r0} with the modulus")
    return s0 % p


class FieldSpec:
    """The field GF(p): just the modulus, shared by every value bound to it."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        p = int(p)
        if p < 2:
            raise InvalidPrime(f"modulus must be at least 2, got {p}")
        self.p = p

    @classmethod
    def checked(cls, p: int, rounds: int = MILLER_RABIN_ROUNDS, rng=None) -> "FieldSpec":
        """Construct after verifying primality of p (Miller-Rabin, `rounds` rounds)."""
        spec = cls(p)
        if not is_probable_prime(spec.p, rounds, rng):
            raise InvalidPrime(f"{p} is not prime")
        return spec

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def random_element(self, rng: random.Random) -> "FieldElement":
        return FieldElement(rng.randrange(self.p), self)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.p == other.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __repr__(self):
        return f"FieldSpec(p={self.p})"


class FieldElement:
    """A canonical residue in [0, p) tied to its FieldSpec."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: FieldSpec):
        self.field = field
        self.value = int(value) % field.p

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise MismatchedField(
                    f"cannot mix GF({self.field.p}) and GF({other.field.p})"
                )
            return other
        if isinstance(other, int):
            return FieldElement(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + other.value, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - other.value, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(other.value - self.value, self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * other.value, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def inv(self) -> "FieldElement":
        return FieldElement(mod_inverse(self.value, self.field.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value} mod {self.field.p})"
