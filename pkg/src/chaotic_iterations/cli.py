"""Command-line front end.

Every output line is either ``key=value`` pairs or CSV.  Exit status is 0 on
success, 1 when a domain check fails (for instance a function that is not
chaotic where chaos is required), and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import math
import random
import sys
from typing import Iterator, Optional, Sequence

from . import graph, hashing, metric
from .core import (
    StateVector,
    Strategy,
    SystemPoint,
    Unary,
    UpdateFunction,
    make_identity,
    make_negation,
    trajectory,
)
from .errors import ChaosError, FrameError, TruthTableError
from .tables import read_truth_table

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _hex_bytes(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {text!r}") from None


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _load_function(source: str) -> UpdateFunction:
    kind, _, arg = source.partition(":")
    if kind in ("neg", "id") and arg:
        try:
            n = int(arg)
        except ValueError:
            raise UsageError(f"bad arity in {source!r}") from None
        return make_negation(n) if kind == "neg" else make_identity(n)
    return read_truth_table(source)


def parse_strategy_csv(n: int, text: str) -> Strategy:
    """``1,2,3`` for unary terms, ``{1|2},{},{3}`` for subsets."""
    text = text.strip()
    if not text:
        return Strategy(n)
    items = [t.strip() for t in text.split(",")]
    try:
        if all(t.startswith("{") and t.endswith("}") for t in items):
            sets = [[int(i) for i in t[1:-1].split("|") if i.strip()] for t in items]
            return Strategy.subsets(n, sets)
        return Strategy.unary(n, [int(t) for t in items])
    except ValueError as exc:
        raise UsageError(f"bad strategy {text!r}: {exc}") from None


def _render_term(t) -> str:
    if isinstance(t, Unary):
        return str(t.index)
    return "{" + "|".join(str(i) for i in sorted(t.indices)) + "}"


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def iter_frames(data: bytes, frame_bits: int, framing: str) -> Iterator[bytes]:
    size = frame_bits // 8
    if framing == "fixed":
        if len(data) % size:
            raise FrameError(f"input length {len(data)} is not a multiple of the {size}-byte frame")
        for pos in range(0, len(data), size):
            yield data[pos:pos + size]
        return
    pos = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise FrameError("truncated length prefix")
        length = int.from_bytes(data[pos:pos + 4], "big")
        pos += 4
        if length != size:
            raise FrameError(f"frame length {length} bytes, expected {size}")
        if pos + length > len(data):
            raise FrameError("truncated frame")
        yield data[pos:pos + length]
        pos += length


def _emit(line: str):
    print(line, flush=True)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_hash(args) -> int:
    key = hashing.HashKey(args.k1, args.k2, args.rounds)
    inner = hashing.InnerHash(args.algorithm, args.bits)
    digest = hashing.chaotic_hash(key, _read_input(args.file), inner=inner)
    _emit(f"digest={digest.hex()}")
    return EXIT_OK


def cmd_stream_hash(args) -> int:
    if args.frame_bits < 8 or args.frame_bits % 8:
        raise UsageError("--frame-bits must be a positive multiple of 8")
    key = hashing.HashKey(args.k1, args.k2)
    frames = iter_frames(_read_input(args.file), args.frame_bits, args.framing)
    stream = hashing.chaotic_hash_stream(key, frames, n=args.frame_bits,
                                         mask_with_prng=not args.no_prng)
    for t, digest in enumerate(stream):
        _emit(f"frame={t} digest={digest.hex()}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    report = graph.analyze(read_truth_table(args.table))
    _emit(metric.format_report(
        chaotic=str(report["chaotic"]).lower(), scc=report["scc"],
        vertices=report["vertices"], arcs=report["arcs"]))
    if args.require_chaotic and not report["chaotic"]:
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_enumerate(args) -> int:
    progress = None
    if args.progress:
        def progress(done, total):
            print(f"progress={done}/{total}", file=sys.stderr, flush=True)
    result = graph.enumerate_chaotic(args.n, progress=progress)
    _emit(result.line())
    _emit(f"claimed={result.claimed} claim={'holds' if result.claim_holds else 'contradicted'}")
    if args.oracle_step:
        checked, mismatches = graph.sample_agreement(args.n, args.oracle_step)
        _emit(f"oracle=reachability step={args.oracle_step} checked={checked} "
              f"mismatches={mismatches}")
        if mismatches:
            return EXIT_DOMAIN
    return EXIT_OK


def cmd_trajectory(args) -> int:
    f = _load_function(args.f)
    x0 = StateVector.from_hex(f.arity, args.x0)
    s = parse_strategy_csv(f.arity, args.strategy)
    states = trajectory(f, x0, s, args.steps)
    _emit("step,term,state")
    for t, x in enumerate(states):
        term = _render_term(s.term(t - 1)) if t else ""
        _emit(f"{t},{term},{x.hex()}")
    return EXIT_OK


def cmd_distance(args) -> int:
    n = args.n
    make = Strategy.periodic if args.periodic else Strategy.unary
    try:
        s = make(n, [int(t) for t in args.s.split(",")])
        t = make(n, [int(t) for t in args.t.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad strategy: {exc}") from None
    x = SystemPoint(s, StateVector.from_hex(n, args.x))
    y = SystemPoint(t, StateVector.from_hex(n, args.y))
    d = metric.distance(x, y, args.precision)
    frac = d.as_fraction()
    _emit(metric.format_report(
        hamming=d.integer_part, numerator=d.fractional_numerator,
        denominator=d.denominator, distance=f"{frac.numerator}/{frac.denominator}"))
    return EXIT_OK


def cmd_avalanche(args) -> int:
    key = hashing.HashKey(args.k1, args.k2, args.rounds)
    stats = hashing.avalanche_stats(key, args.trials, args.seed, args.message_bytes)
    _emit(stats.line())
    return EXIT_OK


def run_checks(quick: bool = False, seed: int = 0) -> list:
    """(line, passed) pairs for the finite chaos checks."""
    results = []

    max_n = 6 if quick else 10
    certified = graph.certify_negation(max_n)
    ok = all(certified.values())
    results.append((metric.format_report(check="negation_chaotic", N=f"1..{max_n}", result=ok), ok))

    fns = range(0, 256, 17) if quick else range(256)
    violations = sum(
        metric.continuity_check(graph.function_from_index(2, i), 20, 4, seed=i).violations
        for i in fns)
    ok = violations == 0
    results.append((metric.format_report(check="continuity", N=2, functions=len(fns), k=4,
                                         violations=violations, result=ok), ok))

    n, k, horizon = 4, 3, 16
    probes = 20 if quick else 100
    rng = random.Random(seed)
    f0 = make_negation(n)
    worst = None
    for _ in range(probes):
        s = Strategy.unary(n, [rng.randint(1, n) for _ in range(horizon + metric.DEFAULT_PRECISION)])
        d = metric.sensitivity_probe(f0, SystemPoint(s, StateVector(n, rng.getrandbits(n))),
                                     k, horizon)
        worst = d if worst is None or d < worst else worst
    ok = worst >= n - 1
    results.append((metric.format_report(check="sensitivity", N=n, k=k, H=horizon, probes=probes,
                                         min_divergence=str(worst), result=ok), ok))

    for n, p, h in ((2, 3, 6),) if quick else ((2, 3, 6), (3, 3, 8)):
        ok = metric.expansiveness_check_f0(n, p, h)
        results.append((metric.format_report(check="expansiveness", N=n, P=p, H=h, result=ok), ok))

    for n in (2, 3):
        counts = metric.entropy_growth(n, 8)
        exact = all(c == 2 ** n * n ** (k - 1) for k, c in enumerate(counts, start=1))
        slope = metric.entropy_slope(counts)
        ok = exact and abs(slope - math.log(n)) <= 0.05 * math.log(n)
        results.append((metric.format_report(check="entropy", N=n, n_max=8, slope=f"{slope:.6f}",
                                             ln_N=f"{math.log(n):.6f}", result=ok), ok))
    return results


def cmd_verify(args) -> int:
    failed = False
    for line, ok in run_checks(args.quick, args.seed):
        _emit(line)
        failed |= not ok
    return EXIT_DOMAIN if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaotic-iter",
        description="Chaotic iterations, chaos certification and keyed hash post-treatment.")
    sub = parser.add_subparsers(dest="command", required=True)

    def key_args(p, rounds=True):
        p.add_argument("--k1", type=_hex_bytes, required=True, help="inner hash key (hex)")
        p.add_argument("--k2", type=_hex_bytes, required=True, help="strategy seed (hex)")
        if rounds:
            p.add_argument("--rounds", type=_non_negative, default=None,
                           help="post-treatment rounds (default: digest bits)")

    p = sub.add_parser("hash", help="hash a file (use - for stdin)")
    key_args(p)
    p.add_argument("--algorithm", default="sha256")
    p.add_argument("--bits", type=int, default=None, help="truncate the inner digest")
    p.add_argument("file")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("stream-hash", help="running digest after every frame")
    key_args(p, rounds=False)
    p.add_argument("--frame-bits", type=int, default=256)
    p.add_argument("--framing", choices=("fixed", "length-prefixed"), default="fixed")
    p.add_argument("--no-prng", action="store_true",
                   help="use frames as update sets directly (test profile, insecure)")
    p.add_argument("file")
    p.set_defaults(func=cmd_stream_hash)

    p = sub.add_parser("analyze", help="certify a truth table")
    p.add_argument("table")
    p.add_argument("--require-chaotic", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("enumerate", help="count chaotic functions exhaustively")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle-step", type=int, default=0,
                   help="cross-check every STEP-th function with the reachability oracle")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("trajectory", help="iterate and print states as CSV")
    p.add_argument("--f", required=True, help="truth table path, neg:N or id:N")
    p.add_argument("--x0", required=True, help="initial state (hex)")
    p.add_argument("--strategy", required=True)
    p.add_argument("--steps", type=_non_negative, required=True)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("distance", help="exact distance between two points")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--precision", type=int, default=metric.DEFAULT_PRECISION)
    p.add_argument("--periodic", action="store_true", help="repeat --s and --t forever")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("avalanche", help="avalanche statistics of the keyed hash")
    key_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--message-bytes", type=int, default=32)
    p.set_defaults(func=cmd_avalanche)

    p = sub.add_parser("verify", help="run the finite chaos checks")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
    except TruthTableError as exc:
        print(f"error: malformed truth table: {exc}", file=sys.stderr)
    except FrameError as exc:
        print(f"error: frame size mismatch: {exc}", file=sys.stderr)
    except (UsageError, ChaosError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
