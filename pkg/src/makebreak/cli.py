"""Command-line front end: parameter generation, exchange simulation, attack
runs, and the CSV benchmark harness.

File formats are plain JSON with big integers as decimal strings and matrices
as row-major nested arrays of decimal strings; human-diffable and free of
binary ambiguity. Exit codes: 0 success, 1 usage or selftest failure,
2 attack failure, 3 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys

from .attack import AttackInput, EmptyKernel, RetriesExceeded, attack, build_system, compute_z, solve_kernel
from .bench import (
    CSV_HEADER,
    RunConfig,
    mix_seed,
    random_params,
    run_bench,
    sample_exponent,
    format_summary,
    summarize,
)
from .field import FieldSpec, InvalidPrime, gen_prime, mod_inverse
from .matrix import MatrixFp, ShapeMismatch, poly_eval
from .protocol import ProtocolParams, public_sum_oracle, run_exchange

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ATTACK = 2
EXIT_MALFORMED = 3


class MalformedFile(ValueError):
    """An input file could not be read or does not match the expected schema."""


# ----------------------------------------------------------------------
# file formats
# ----------------------------------------------------------------------

def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFile(f"{path}: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedFile(f"{path}: expected a JSON object")
    return obj


def _parse_bigint(obj: dict, key: str, path: str) -> int:
    val = obj.get(key)
    if not isinstance(val, str) or not val.isdigit():
        raise MalformedFile(f"{path}: field {key!r} must be a decimal string")
    return int(val)


def _parse_matrix(obj: dict, key: str, field: FieldSpec, k: int, path: str) -> MatrixFp:
    val = obj.get(key)
    if not isinstance(val, list):
        raise MalformedFile(f"{path}: field {key!r} must be an array of arrays")
    try:
        mat = MatrixFp.from_strings(field, val)
    except (ValueError, TypeError) as exc:
        raise MalformedFile(f"{path}: field {key!r}: {exc}") from None
    if mat.k != k:
        raise MalformedFile(f"{path}: field {key!r} has dimension {mat.k}, expected {k}")
    return mat


def save_params(path: str, params: ProtocolParams) -> None:
    _write_json(path, {
        "p": str(params.field.p),
        "k": params.k,
        "M": params.M.to_strings(),
        "H": params.H.to_strings(),
    })


def load_params(path: str) -> ProtocolParams:
    obj = _read_json(path)
    p = _parse_bigint(obj, "p", path)
    k = obj.get("k")
    if not isinstance(k, int) or k < 1:
        raise MalformedFile(f"{path}: field 'k' must be a positive integer")
    try:
        field = FieldSpec.checked(p)
    except InvalidPrime as exc:
        raise MalformedFile(f"{path}: {exc}") from None
    M = _parse_matrix(obj, "M", field, k, path)
    H = _parse_matrix(obj, "H", field, k, path)
    try:
        return ProtocolParams(field=field, k=k, M=M, H=H)
    except (ValueError, ShapeMismatch) as exc:
        raise MalformedFile(f"{path}: {exc}") from None


def save_transcript(path: str, A: MatrixFp, B: MatrixFp,
                    secrets: dict | None = None) -> None:
    obj = {"A": A.to_strings(), "B": B.to_strings()}
    if secrets:
        obj["m"] = str(secrets["m"])
        obj["n"] = str(secrets["n"])
        obj["K"] = secrets["K"].to_strings()
    _write_json(path, obj)


def load_transcript(path: str, field: FieldSpec, k: int) -> dict:
    obj = _read_json(path)
    out = {
        "A": _parse_matrix(obj, "A", field, k, path),
        "B": _parse_matrix(obj, "B", field, k, path),
    }
    if "K" in obj:
        out["K"] = _parse_matrix(obj, "K", field, k, path)
    return out


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_gen_params(args) -> int:
    rng = random.Random(args.seed)
    if args.prime is not None:
        try:
            field = FieldSpec.checked(args.prime)
        except InvalidPrime as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        field = FieldSpec(gen_prime(args.bits, rng))
    params = random_params(field, args.k, rng)
    save_params(args.out, params)
    print(f"wrote {args.out}: p with {field.p.bit_length()} bits, k={args.k}")
    return EXIT_OK


def cmd_exchange(args) -> int:
    params = load_params(args.params)
    rng = random.Random(args.seed)
    bits = max(2, params.field.p.bit_length())
    m = sample_exponent(bits, rng)
    n = sample_exponent(bits, rng)
    alice, bob, key = run_exchange(params, m, n)
    secrets = {"m": m, "n": n, "K": key} if args.include_secrets else None
    save_transcript(args.out, alice.public_part, bob.public_part, secrets)
    suffix = " (secrets included)" if args.include_secrets else ""
    print(f"wrote {args.out}: exchange transcript{suffix}")
    return EXIT_OK


def cmd_attack(args) -> int:
    params = load_params(args.params)
    transcript = load_transcript(args.transcript, params.field, params.k)
    inp = AttackInput(
        field=params.field, k=params.k, M=params.M, H=params.H,
        A=transcript["A"], B=transcript["B"],
    )
    rng = random.Random(args.seed)
    try:
        recovered, stats = attack(inp, rng, max_retries=args.max_retries)
    except (EmptyKernel, RetriesExceeded) as exc:
        print(f"attack failed: {exc}", file=sys.stderr)
        return EXIT_ATTACK
    result = {
        "recovered_key": recovered.to_strings(),
        "kernel_dim": stats.kernel_dim,
        "retries": stats.retries,
        "elapsed_ms": round(stats.elapsed_ms, 3),
    }
    line = (f"attack done: kernel_dim={stats.kernel_dim} retries={stats.retries} "
            f"elapsed_ms={stats.elapsed_ms:.3f}")
    if "K" in transcript:
        result["matches"] = recovered == transcript["K"]
        line += f" matches={str(result['matches']).lower()}"
    _write_json(args.out, result)
    print(line)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = RunConfig(
        primes=args.primes or [],
        gen_bits=args.gen_bits or [],
        k=args.k,
        trials=args.trials,
        seed=args.seed,
        exponent_bits=args.exponent_bits,
    )
    try:
        config.validate()
    except (InvalidPrime, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    records = run_bench(config)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.csv_row())
    print(format_summary(summarize(records)))
    print(f"wrote {args.out}: {len(records)} trials")
    if not all(rec.success for rec in records):
        print("error: some trials failed key recovery", file=sys.stderr)
        return EXIT_ATTACK
    return EXIT_OK


# ----------------------------------------------------------------------
# selftest
# ----------------------------------------------------------------------

def _selftest_checks():
    """Fixed-value checks for the embedded p=17, k=2 instance plus small fuzz."""
    field = FieldSpec(17)
    M = MatrixFp.from_rows(field, [[2, 0], [0, 3]])
    H = MatrixFp.from_rows(field, [[1, 1], [0, 1]])
    A = MatrixFp.from_rows(field, [[4, 5], [0, 6]])
    B = MatrixFp.from_rows(field, [[6, 15], [0, 9]])
    K = MatrixFp.from_rows(field, [[10, 16], [0, 15]])

    def scalar_arithmetic():
        return (9 + 12) % 17 == 4 and mod_inverse(5, 17) == 7 and (3 - 5) % 17 == 15

    def matrix_products():
        return H * M == MatrixFp.from_rows(field, [[2, 3], [0, 3]]) and H ** 2 == MatrixFp.from_rows(field, [[1, 2], [0, 1]])

    def flatten_round_trip():
        return MatrixFp.from_flat(field, 2, M.flatten()) == M

    def public_values():
        return public_sum_oracle(M, H, 2) == A and public_sum_oracle(M, H, 3) == B

    def exchange_key():
        _, _, key = run_exchange(ProtocolParams(field, 2, M, H), 2, 3)
        return key == K and key == public_sum_oracle(M, H, 5)

    def kernel_substitution():
        Z = compute_z(M, H, A)
        basis = solve_kernel(build_system(M, H, Z), field)
        return all(
            poly_eval(v[:2], H) * M == Z * poly_eval(v[2:], H)
            for v in basis
        )

    def attack_recovers_key():
        inp = AttackInput(field=field, k=2, M=M, H=H, A=A, B=B)
        recovered, stats = attack(inp, random.Random(7))
        return recovered == K and stats.retries >= 1

    def random_instances():
        for i in range(10):
            rng = random.Random(1000 + i)
            p = [17, 19][i % 2]
            k = [2, 3][(i // 2) % 2]
            f = FieldSpec(p)
            params = random_params(f, k, rng)
            m = sample_exponent(5, rng)
            n = sample_exponent(5, rng)
            alice, bob, true_key = run_exchange(params, m, n)
            inp = AttackInput(field=f, k=k, M=params.M, H=params.H,
                              A=alice.public_part, B=bob.public_part)
            recovered, _ = attack(inp, rng)
            if recovered != true_key:
                return False
        return True

    return [
        ("scalar arithmetic", scalar_arithmetic),
        ("matrix products", matrix_products),
        ("flatten round trip", flatten_round_trip),
        ("public values", public_values),
        ("exchange key", exchange_key),
        ("kernel substitution", kernel_substitution),
        ("attack recovers key", attack_recovers_key),
        ("random instances", random_instances),
    ]


def cmd_selftest(args) -> int:
    checks = _selftest_checks()
    for name, check in checks:
        try:
            ok = check()
        except Exception as exc:  # a crash is a failure, not an abort
            print(f"selftest FAILED at: {name} ({exc!r})", file=sys.stderr)
            return EXIT_USAGE
        if not ok:
            print(f"selftest FAILED at: {name}", file=sys.stderr)
            return EXIT_USAGE
        print(f"ok: {name}")
    print(f"selftest: all {len(checks)} checks passed")
    return EXIT_OK


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; keep 2 for attack failures
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _seed_type(text: str) -> int:
    val = int(text)
    if not 0 <= val < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return val


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="makebreak",
                     description="MAKE key exchange and key-recovery attack toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-params", help="generate session parameters")
    group = gen.add_mutually_exclusive_group(required=True)
    group.add_argument("--bits", type=int, help="generate a prime of this many bits")
    group.add_argument("--prime", type=int, help="use this prime (decimal)")
    gen.add_argument("--k", type=int, default=3, help="matrix dimension (default 3)")
    gen.add_argument("--seed", type=_seed_type, default=0)
    gen.add_argument("--out", required=True, help="parameter file to write")
    gen.set_defaults(func=cmd_gen_params)

    exch = sub.add_parser("exchange", help="simulate one key exchange")
    exch.add_argument("--params", required=True, help="parameter file")
    exch.add_argument("--include-secrets", action="store_true",
                      help="also record m, n and the true key (for verification)")
    exch.add_argument("--seed", type=_seed_type, default=0)
    exch.add_argument("--out", required=True, help="transcript file to write")
    exch.set_defaults(func=cmd_exchange)

    atk = sub.add_parser("attack", help="recover the key from a transcript")
    atk.add_argument("--params", required=True, help="parameter file")
    atk.add_argument("--transcript", required=True, help="transcript file")
    atk.add_argument("--max-retries", type=int, default=64)
    atk.add_argument("--seed", type=_seed_type, default=0)
    atk.add_argument("--out", required=True, help="result file to write")
    atk.set_defaults(func=cmd_attack)

    bench = sub.add_parser("bench", help="run the experiment harness")
    bench.add_argument("--primes", type=_int_list, default=[],
                       help="comma list of explicit primes (decimal)")
    bench.add_argument("--gen-bits", type=_int_list, default=[],
                       help="comma list of prime bit lengths to generate")
    bench.add_argument("--trials", type=int, default=1)
    bench.add_argument("--exponent-bits", type=int, default=None,
                       help="override the private-exponent range (default: bit length of p)")
    bench.add_argument("--k", type=int, default=3)
    bench.add_argument("--seed", type=_seed_type, default=0)
    bench.add_argument("--out", required=True, help="CSV file to write")
    bench.set_defaults(func=cmd_bench)

    self_p = sub.add_parser("selftest", help="run the embedded fixed-value checks")
    self_p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except MalformedFile as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ShapeMismatch as exc:
        print(f"error: inconsistent input shapes: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
