"""The MAKE key exchange on pairs of k-by-k matrices over GF(p).

Pairs (G, H) multiply by the twisted rule

    (G1, H1) * (G2, H2) = (H2*G1*H2 + G2, H1*H2)

which is associative, so powers can be taken by square-and-multiply. The
e-th power of the public pair (M, H) has the closed form

    (M, H)^e = (M + H*M*H + ... + H^(e-1)*M*H^(e-1), H^e).

Alice publishes the first component A of (M, H)^m and keeps H^m; Bob does
the same with n. Each side then conjugates the other's public matrix by its
secret power of H and adds its own public matrix, landing on the common key

    K = H^m*B*H^m + A = H^n*A*H^n + B = sum_{i<m+n} H^i*M*H^i.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import FieldSpec
from .matrix import MatrixFp, ShapeMismatch, SingularMatrix


class KeyMismatch(AssertionError):
    """Alice's and Bob's derived keys differ; indicates an implementation bug."""


@dataclass(frozen=True)
class SemidirectElement:
    """A pair (G, Hpart) in the twisted product above."""

    G: MatrixFp
    Hpart: MatrixFp

    def __post_init__(self):
        if self.G.k != self.Hpart.k or self.G.field.p != self.Hpart.field.p:
            raise ShapeMismatch("pair components must share dimension and field")


def sd_mul(x: SemidirectElement, y: SemidirectElement) -> SemidirectElement:
    """(G1,H1)*(G2,H2) = (H2*G1*H2 + G2, H1*H2)."""
    return SemidirectElement(
        y.Hpart * x.G * y.Hpart + y.G,
        x.Hpart * y.Hpart,
    )


def sd_pow(base: SemidirectElement, e: int) -> SemidirectElement:
    """e-th power under sd_mul, left-to-right square-and-multiply; e >= 1."""
    e = int(e)
    if e < 1:
        raise ValueError("exponent must be at least 1")
    acc = base
    for bit in bin(e)[3:]:
        acc = sd_mul(acc, acc)
        if bit == "1":
            acc = sd_mul(acc, base)
    return acc


def public_sum_oracle(M: MatrixFp, H: MatrixFp, e: int) -> MatrixFp:
    """Direct O(e) accumulation of M + H*M*H + ... + H^(e-1)*M*H^(e-1).

    Test oracle for the G component of sd_pow; only usable for small e.
    """
    if e < 1:
        raise ValueError("exponent must be at least 1")
    total = M
    term = M
    for _ in range(e - 1):
        term = H * term * H
        total = total + term
    return total


@dataclass(frozen=True)
class ProtocolParams:
    """Public session parameters: the prime field and invertible M, H."""

    field: FieldSpec
    k: int
    M: MatrixFp
    H: MatrixFp

    def __post_init__(self):
        for name, mat in (("M", self.M), ("H", self.H)):
            if mat.k != self.k or mat.field.p != self.field.p:
                raise ShapeMismatch(f"{name} does not match the declared field/dimension")
            try:
                mat.inv()
            except SingularMatrix:
                raise ValueError(f"{name} must be invertible") from None


@dataclass
class PartyState:
    """One participant's view: secret exponent and H-power, published matrix."""

    exponent: int
    public_part: MatrixFp
    h_power: MatrixFp = dc_field(repr=False)

    def __repr__(self):
        # exponent and h_power are secrets; keep them out of logs
        return f"PartyState(public_part={self.public_part!r}, secrets=<hidden>)"


def make_party(params: ProtocolParams, exponent: int) -> PartyState:
    """Compute (M,H)^exponent and split it into published/secret halves."""
    pair = sd_pow(SemidirectElement(params.M, params.H), exponent)
    return PartyState(exponent=exponent, public_part=pair.G, h_power=pair.Hpart)


def derive_shared(own: PartyState, other_public: MatrixFp) -> MatrixFp:
    """Session key as seen from one side: h_power*other*h_power + own public."""
    return own.h_power * other_public * own.h_power + own.public_part


def run_exchange(
    params: ProtocolParams, m: int, n: int
) -> tuple[PartyState, PartyState, MatrixFp]:
    """Full exchange for exponents m, n; returns both parties and the key.

    Both sides derive the key independently and the results are compared;
    KeyMismatch is unreachable for a correct implementation.
    """
    alice = make_party(params, m)
    bob = make_party(params, n)
    k_alice = derive_shared(alice, bob.public_part)
    k_bob = derive_shared(bob, alice.public_part)
    if k_alice != k_bob:
        raise KeyMismatch("the two derived session keys differ")
    return alice, bob, k_alice
