"""Recovery of the MAKE session key from the public transcript alone.

The eavesdropper sees (p, k, M, H, A, B) and nothing else. Set

    Z = H*A*H + M - A.

If R and S commute with H and satisfy R*M*S = Z, then expanding
B = sum_{i<n} H^i*M*H^i term by term telescopes into

    R*B*S + A = H^n*A*H^n + B = K,

so such a pair hands over the session key without touching m or n. Pairs of
that shape exist among polynomials in H: R = f(H) and S = g(H)^(-1) work
whenever

    f(H)*M = Z*g(H)                                  (*)

with g(H) invertible, and powers of H beyond H^(k-1) reduce through the
characteristic polynomial, so degree k-1 coefficients suffice. Equation (*)
is a homogeneous linear system of k^2 equations in the 2k coefficients
(f_0..f_{k-1}, g_0..g_{k-1}); flattening the matrices H^i*M and -(Z*H^i)
into rows makes its solution space a left kernel. Solutions are sampled at
random from that kernel until g(H) inverts; in practice the kernel is
one-dimensional and the first sample already works.

Everything here is pure given (input, rng); concurrent attacks need only
independent rng streams.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .field import FieldSpec
from .matrix import MatrixFp, ShapeMismatch, SingularMatrix, left_kernel, poly_eval


class EmptyKernel(ValueError):
    """The linear system has only the zero solution.

    Impossible for a genuine MAKE transcript (a solution always exists), so
    this signals corrupted or fabricated input.
    """


class SingularG(ArithmeticError):
    """The sampled solution gave a non-invertible g(H); caller should retry."""


class RetriesExceeded(RuntimeError):
    """No invertible g(H) found within the retry budget."""


@dataclass(frozen=True)
class AttackInput:
    """Public transcript only; the type cannot hold m, n, or powers of H."""

    field: FieldSpec
    k: int
    M: MatrixFp
    H: MatrixFp
    A: MatrixFp
    B: MatrixFp

    def __post_init__(self):
        for name in ("M", "H", "A", "B"):
            mat = getattr(self, name)
            if mat.k != self.k or mat.field.p != self.field.p:
                raise ShapeMismatch(f"{name} does not match the declared field/dimension")


@dataclass(frozen=True)
class SolutionVector:
    """Coefficients (f_0..f_{k-1}, g_0..g_{k-1}) of one kernel sample."""

    f_coeffs: list[int]
    g_coeffs: list[int]


@dataclass(frozen=True)
class CommutingPair:
    """Matrices R, S commuting with H with R*M*S = Z."""

    R: MatrixFp
    S: MatrixFp


@dataclass(frozen=True)
class AttackStats:
    """Observables of one attack run."""

    kernel_dim: int
    retries: int
    elapsed_ms: float


def compute_z(M: MatrixFp, H: MatrixFp, A: MatrixFp) -> MatrixFp:
    """Z = H*A*H + M - A, built from public data only."""
    return H * A * H + M - A


def build_system(M: MatrixFp, H: MatrixFp, Z: MatrixFp) -> list[list[int]]:
    """Rows of the homogeneous system behind equation (*).

    Rows 0..k-1 are flatten(H^i * M); rows k..2k-1 are flatten(-(Z * H^i)).
    The g-block is negated so a left-kernel vector (f, g) satisfies
    f(H)*M = Z*g(H) directly, with no sign fixing afterwards.
    """
    k = M.k
    p = M.field.p
    rows = []
    term = M
    for i in range(k):
        rows.append(term.flatten())
        if i < k - 1:
            term = H * term
    term = Z
    for i in range(k):
        rows.append([-x % p for x in term.flatten()])
        if i < k - 1:
            term = term * H
    return rows


def solve_kernel(system: list[list[int]], field: FieldSpec) -> list[list[int]]:
    """Basis of all coefficient vectors solving the system."""
    basis = left_kernel(system, field)
    if not basis:
        raise EmptyKernel("linear system has no nonzero solution; transcript is not a valid exchange")
    return basis


def sample_solution(
    basis: list[list[int]], field: FieldSpec, rng: random.Random
) -> SolutionVector:
    """Uniform nonzero element of the kernel's span.

    Draws one coefficient per basis vector; an all-zero combination is
    resampled (for a nonempty basis this terminates with probability 1).
    """
    if not basis:
        raise ValueError("basis must be nonempty")
    p = field.p
    width = len(basis[0])
    k = width // 2
    while True:
        vec = [0] * width
        for b in basis:
            c = rng.randrange(p)
            if c:
                vec = [(x + c * y) % p for x, y in zip(vec, b)]
        if any(vec):
            return SolutionVector(vec[:k], vec[k:])


def assemble_pair(sol: SolutionVector, H: MatrixFp) -> CommutingPair:
    """R = f(H) and S = g(H)^(-1) from one solution; SingularG when g(H) is not invertible."""
    R = poly_eval(sol.f_coeffs, H)
    G = poly_eval(sol.g_coeffs, H)
    try:
        S = G.inv()
    except SingularMatrix:
        raise SingularG("sampled g(H) is singular") from None
    return CommutingPair(R=R, S=S)


def recover_key(pair: CommutingPair, B: MatrixFp, A: MatrixFp) -> MatrixFp:
    """K = R*B*S + A."""
    return pair.R * B * pair.S + A


def attack(
    inp: AttackInput, rng: random.Random, max_retries: int = 64
) -> tuple[MatrixFp, AttackStats]:
    """Run the full pipeline; returns the recovered key and run statistics.

    retries counts solution samples including the successful one; the kernel
    dimension is reported as observed, never assumed to be 1.
    """
    if max_retries < 1:
        raise ValueError("max_retries must be at least 1")
    start = time.perf_counter()
    Z = compute_z(inp.M, inp.H, inp.A)
    system = build_system(inp.M, inp.H, Z)
    basis = solve_kernel(system, inp.field)
    pair = None
    retries = 0
    while pair is None:
        if retries == max_retries:
            raise RetriesExceeded(f"no invertible g(H) in {max_retries} samples")
        retries += 1
        sol = sample_solution(basis, inp.field, rng)
        try:
            pair = assemble_pair(sol, inp.H)
        except SingularG:
            continue
    key = recover_key(pair, inp.B, inp.A)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return key, AttackStats(kernel_dim=len(basis), retries=retries, elapsed_ms=elapsed_ms)
