"""``dasm`` command line.

Exit codes: 0 success (``verify``: stable), 1 unstable or failed cross-check,
2 bad flags, 3 I/O or malformed matching file, 4 invalid instance or
matching, 5 instance too large for the oracle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ilp
from .bench import bench_tasks, rows_to_csv, run_bench
from .blocking import find_blocking_tuple, swapped_matching
from .generator import GenParams, ParamOutOfRange, generate
from .io import (
    MatchingFormatError,
    dumps_instance,
    loads_instance,
    loads_matching,
    matching_to_dict,
    verdict_to_dict,
)
from .model import InstanceError, Lambda, is_valid_matching
from .oracle import DEFAULT_PAIR_CAP, InstanceTooLarge, cross_check
from .solver import solve

EXIT_UNSTABLE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVALID = 4
EXIT_TOO_LARGE = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    raw = os.environ.get("DASM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"DASM_SEED must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _load_instance(path: str):
    text = _read(path)
    try:
        return loads_instance(text)
    except (json.JSONDecodeError, InstanceError, ValueError, TypeError) as exc:
        raise CliError(EXIT_INVALID, f"invalid instance {path}: {exc}") from exc


def _lambda(text: str) -> Lambda:
    try:
        return Lambda.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _m_list(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad employer list {text!r}") from None
    if not out or any(m < 0 for m in out):
        raise argparse.ArgumentTypeError(f"bad employer list {text!r}")
    return out


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def cmd_generate(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    try:
        p = GenParams(m=args.employers, ratio=args.ratio, q=args.quota, t=args.threshold, seed=seed)
    except ParamOutOfRange as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    _write(args.out, dumps_instance(generate(p)))
    return 0


def cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    result = solve(inst, args.algorithm)
    doc = matching_to_dict(inst, result.matching)
    if args.trace:
        doc["trace"] = result.trace_dict(inst)
    _write(args.out, _dump(doc))
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance(args.input)
    text = _read(args.matching)
    try:
        mu = loads_matching(inst, text)
    except MatchingFormatError as exc:
        raise CliError(EXIT_IO, f"malformed matching {args.matching}: {exc}") from exc
    if not is_valid_matching(inst, mu):
        raise CliError(EXIT_INVALID, "matching exceeds a quota")
    witness = find_blocking_tuple(inst, mu, args.lam)
    mu_prime = None if witness is None else swapped_matching(inst, mu, witness)
    sys.stdout.write(_dump(verdict_to_dict(inst, args.lam, witness, mu_prime)))
    return 0 if witness is None else EXIT_UNSTABLE


def cmd_ilp_export(args) -> int:
    inst = _load_instance(args.input)
    model = ilp.build_model(inst, args.lam)
    _write(args.out, ilp.export_lp(model))
    return 0


def cmd_bench(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    if args.trials < 0 or args.jobs < 1:
        raise CliError(EXIT_USAGE, "--trials must be >= 0 and --jobs >= 1")
    try:
        tasks = bench_tasks(args.m_list, args.ratio, args.quota, args.threshold, args.trials,
                            seed, args.algorithm, args.verify_upto)
    except ParamOutOfRange as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    _write(args.csv, rows_to_csv(run_bench(tasks, args.jobs)))
    return 0


def cmd_oracle(args) -> int:
    inst = _load_instance(args.input)
    try:
        report = cross_check(inst, args.lam, cap=args.cap)
    except InstanceTooLarge as exc:
        raise CliError(EXIT_TOO_LARGE, str(exc)) from exc
    _write(args.report, _dump(report.to_dict(inst)))
    return 0 if report.ok else EXIT_UNSTABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dasm", description="Affiliate stable matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--employers", type=int, required=True)
    p.add_argument("--ratio", type=int, default=2)
    p.add_argument("--quota", type=int, default=3)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None, help="defaults to $DASM_SEED or 0")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="compute a matching")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--algorithm", choices=["smart", "naive"], default="smart")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a matching for blocking tuples")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--matching", required=True)
    p.add_argument("--lambda", dest="lam", type=_lambda, default=Lambda.parse("1"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ilp-export", help="write the stability ILP in LP format")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--lambda", dest="lam", type=_lambda, default=Lambda.parse("1"))
    p.set_defaults(func=cmd_ilp_export)

    p = sub.add_parser("bench", help="time the solver on random instances")
    p.add_argument("--m-list", type=_m_list, required=True)
    p.add_argument("--ratio", type=int, default=2)
    p.add_argument("--quota", type=int, default=3)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=None, help="defaults to $DASM_SEED or 0")
    p.add_argument("--algorithm", choices=["smart", "naive"], default="smart")
    p.add_argument("--verify-upto", type=int, default=20000,
                   help="verify stability only when n*m is at most this")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exhaustive cross-check on a tiny instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lambda", dest="lam", type=_lambda, default=Lambda.parse("1"))
    p.add_argument("--cap", type=int, default=DEFAULT_PAIR_CAP)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"dasm: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
