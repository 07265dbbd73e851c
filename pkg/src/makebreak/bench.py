"""Reproducible experiment harness: generate a session, attack it, verify.

Every trial owns an rng stream derived from (seed, prime index, trial index)
through a fixed 64-bit mixer, so results are bit-reproducible and any single
trial can be re-run in isolation. Timing columns are the only thing that
varies between identical runs.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field as dc_field

from .attack import AttackInput, attack
from .field import FieldSpec, gen_prime, is_probable_prime, InvalidPrime
from .matrix import MatrixFp
from .protocol import ProtocolParams, run_exchange

CSV_HEADER = ["prime_bits", "p_index", "trial", "kernel_dim", "retries", "attack_ms", "success"]

_MASK64 = (1 << 64) - 1
_PRIME_GEN_TAG = 0x70726D65  # domain separator for prime generation streams


def mix_seed(seed: int, *parts: int) -> int:
    """Stable splitmix-style combiner for per-trial sub-seeds."""
    x = seed & _MASK64
    for part in parts:
        x = (x + 0x9E3779B97F4A7C15 + (part & _MASK64)) & _MASK64
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
        x ^= x >> 31
    return x


def sample_exponent(bits: int, rng: random.Random) -> int:
    """Uniform private exponent from [2, 2^bits)."""
    if bits < 2:
        raise ValueError("exponent range needs at least 2 bits")
    return rng.randrange(2, 1 << bits)


def random_params(field: FieldSpec, k: int, rng: random.Random) -> ProtocolParams:
    """Fresh session parameters: uniform invertible M and H."""
    M = MatrixFp.random_invertible(field, k, rng)
    H = MatrixFp.random_invertible(field, k, rng)
    return ProtocolParams(field=field, k=k, M=M, H=H)


@dataclass
class RunConfig:
    """One benchmark run: which primes, how many trials, how to seed them."""

    primes: list[int] = dc_field(default_factory=list)
    gen_bits: list[int] = dc_field(default_factory=list)
    k: int = 3
    trials: int = 1
    seed: int = 0
    exponent_bits: int | None = None
    max_retries: int = 64

    def validate(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if not self.primes and not self.gen_bits:
            raise ValueError("need at least one prime or bit length")
        for p in self.primes:
            if not is_probable_prime(p):
                raise InvalidPrime(f"{p} is not prime")

    def resolve_primes(self) -> list[int]:
        """Explicit primes first, then one generated prime per bit length."""
        out = list(self.primes)
        for i, bits in enumerate(self.gen_bits):
            out.append(gen_prime(bits, random.Random(mix_seed(self.seed, _PRIME_GEN_TAG, i))))
        return out


@dataclass
class TrialRecord:
    """Per-trial observables; success means exact recovery of the true key."""

    prime_bits: int
    p_index: int
    trial: int
    kernel_dim: int
    retries: int
    attack_ms: float
    success: bool

    def csv_row(self) -> list[str]:
        return [
            str(self.prime_bits),
            str(self.p_index),
            str(self.trial),
            str(self.kernel_dim),
            str(self.retries),
            f"{self.attack_ms:.3f}",
            "true" if self.success else "false",
        ]


def run_trial(
    p: int,
    k: int,
    rng: random.Random,
    exponent_bits: int | None = None,
    max_retries: int = 64,
) -> TrialRecord:
    """Generate one session, attack it, and compare against the true key."""
    field = FieldSpec(p)
    params = random_params(field, k, rng)
    bits = exponent_bits if exponent_bits is not None else max(2, p.bit_length())
    m = sample_exponent(bits, rng)
    n = sample_exponent(bits, rng)
    alice, bob, true_key = run_exchange(params, m, n)
    inp = AttackInput(
        field=field, k=k, M=params.M, H=params.H,
        A=alice.public_part, B=bob.public_part,
    )
    recovered, stats = attack(inp, rng, max_retries=max_retries)
    return TrialRecord(
        prime_bits=p.bit_length(),
        p_index=0,
        trial=0,
        kernel_dim=stats.kernel_dim,
        retries=stats.retries,
        attack_ms=stats.elapsed_ms,
        success=recovered == true_key,
    )


def run_bench(config: RunConfig) -> list[TrialRecord]:
    """All trials of a config, in deterministic (prime, trial) order."""
    config.validate()
    records = []
    for p_index, p in enumerate(config.resolve_primes()):
        for trial in range(config.trials):
            rng = random.Random(mix_seed(config.seed, p_index, trial))
            rec = run_trial(
                p, config.k, rng,
                exponent_bits=config.exponent_bits,
                max_retries=config.max_retries,
            )
            rec.p_index = p_index
            rec.trial = trial
            records.append(rec)
    return records


def summarize(records: list[TrialRecord]) -> list[dict]:
    """Per-prime success rate and retry/timing statistics."""
    out = []
    indices = sorted({r.p_index for r in records})
    for idx in indices:
        group = [r for r in records if r.p_index == idx]
        times = [r.attack_ms for r in group]
        out.append({
            "p_index": idx,
            "prime_bits": group[0].prime_bits,
            "trials": len(group),
            "successes": sum(r.success for r in group),
            "max_retries": max(r.retries for r in group),
            "mean_ms": statistics.fmean(times),
            "median_ms": statistics.median(times),
        })
    return out


def format_summary(summary: list[dict]) -> str:
    lines = []
    for s in summary:
        lines.append(
            "p_index={p_index} bits={prime_bits} trials={trials} "
            "success={successes}/{trials} max_t={max_retries} "
            "mean_ms={mean_ms:.3f} median_ms={median_ms:.3f}".format(**s)
        )
    return "\n".join(lines)
