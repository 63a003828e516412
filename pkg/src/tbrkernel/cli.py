"""Command-line front end.

Reports are plain ``key=value`` lines on stdout.  Wall time goes to stderr so
that the same input and seed always give byte-identical stdout.

Exit codes: 0 ok, 1 a check reported violations, 2 unreadable input,
3 taxon sets differ, 4 budget exceeded, 5 bad parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
import time
import warnings
from typing import List, Optional, Sequence

from .bruteforce import bruteforce_distance, oracle_max_n
from .errors import (BudgetExceeded, DegreeError, DuplicateLabelError, NetworkError, NewickSyntaxError,
                     TaxonSetMismatchError)
from .newick import NewickDocument, serialize
from .reductions import exhaustively_reduce
from .tbr import BFS_MAX_N, tbr_bfs_distance, tbr_distance
from .tree import caterpillar, check_same_taxa, default_taxa, random_tree
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_MISMATCH, EXIT_BUDGET, EXIT_PARAMS = 0, 1, 2, 3, 4, 5


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("".join(line + "\n" for line in lines))


def _load_pair(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"cannot read {path}: {exc.strerror}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            doc = NewickDocument.from_text(text)
    except (NewickSyntaxError, DegreeError, DuplicateLabelError) as exc:
        raise _Exit(EXIT_PARSE, f"parse error: {exc}")
    if len(doc.trees) != 2:
        raise _Exit(EXIT_PARSE, f"expected two trees, found {len(doc.trees)}")
    t1, t2 = doc.trees
    try:
        check_same_taxa(t1, t2)
    except TaxonSetMismatchError as exc:
        raise _Exit(EXIT_MISMATCH, str(exc))
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return t1, t2, digest


def cmd_distance(args) -> int:
    t1, t2, digest = _load_pair(args.file)
    lines = ["command=distance", f"input_digest={digest}", f"n_taxa={t1.n_taxa}"]
    try:
        res = tbr_distance(t1, t2, args.budget)
    except BudgetExceeded:
        _emit(lines + [f"budget={args.budget}", "budget_exceeded=true"])
        return EXIT_BUDGET
    lines += [
        f"distance={res.distance}",
        f"offset={res.offset}",
        f"kernel_taxa={res.kernel_taxa}",
        f"rule_steps={len(res.trace.steps)}",
        f"witness={res.witness}",
    ]
    code = EXIT_OK
    if args.oracle:
        lines.append(f"oracle={args.oracle}")
        limit = oracle_max_n() if args.oracle == "partition" else BFS_MAX_N
        if t1.n_taxa > limit:
            lines.append(f"oracle_status=skipped_n_above_{limit}")
        else:
            if args.oracle == "partition":
                d = bruteforce_distance(t1, t2, max_n=limit)
            else:
                d = tbr_bfs_distance(t1, t2)
            ok = d == res.distance
            lines += [f"oracle_distance={d}", f"oracle_ok={str(ok).lower()}"]
            code = EXIT_OK if ok else EXIT_VIOLATION
    _emit(lines)
    return code


def cmd_kernelize(args) -> int:
    t1, t2, digest = _load_pair(args.file)
    lines = ["command=kernelize", f"input_digest={digest}", f"n_taxa={t1.n_taxa}"]
    if t1.n_taxa < 4:
        raise _Exit(EXIT_PARAMS, "kernelize needs at least 4 taxa")
    k1, k2, trace = exhaustively_reduce(t1, t2)
    lines += [f"kernel_t1={serialize(k1)}", f"kernel_t2={serialize(k2)}"]
    lines += [step.to_line() for step in trace.steps]
    lines += [f"steps={len(trace.steps)}", f"total_offset={trace.total_offset}",
              f"kernel_taxa={k1.n_taxa}"]
    for new, orig in sorted(trace.label_map.items()):
        lines.append(f"label_map={new}:{','.join(sorted(orig))}")
    code = EXIT_OK
    if args.solve:
        res = tbr_distance(t1, t2)
        d = res.distance
        lines.append(f"distance={d}")
        if d >= 2:
            ok = k1.n_taxa <= 11 * d - 9
            lines += [f"bound={11 * d - 9}", f"bound_ok={str(ok).lower()}"]
            code = EXIT_OK if ok else EXIT_VIOLATION
        else:
            lines += ["bound=none_for_d_below_2", "bound_ok=true"]
    _emit(lines)
    return code


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, seed=args.seed, samples=args.samples)
    _emit(["command=verify", f"seed={args.seed}"] + rep.lines())
    print(f"wall_time_s={rep.seconds:.2f}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_gen(args) -> int:
    from .network import tight_family

    p = args.params
    try:
        if args.kind == "tight":
            (k,) = map(int, p)
            pair = tight_family(k)
        elif args.kind == "random":
            n, seed = map(int, p)
            if n < 1:
                raise ValueError
            rng = random.Random(seed)
            taxa = default_taxa(n)
            pair = (random_tree(taxa, rng), random_tree(taxa, rng))
        else:
            (n,) = map(int, p)
            if n < 1:
                raise ValueError
            t = caterpillar(default_taxa(n))
            pair = (t, t)
    except (ValueError, NetworkError) as exc:
        raise _Exit(EXIT_PARAMS, f"bad parameters for gen {args.kind}: {' '.join(p)} {exc}".rstrip())
    _emit([serialize(t) for t in pair])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tbrkernel", description="Exact TBR distance by kernelization.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distance", help="TBR distance of the two trees in FILE")
    d.add_argument("file")
    d.add_argument("--budget", type=int, default=None, help="give up if the distance exceeds K")
    d.add_argument("--oracle", choices=("partition", "bfs"), help="cross-check with an oracle")
    d.set_defaults(func=cmd_distance)

    k = sub.add_parser("kernelize", help="exhaustively reduce the pair in FILE")
    k.add_argument("file")
    k.add_argument("--solve", action="store_true", help="also compute the distance and audit the kernel bound")
    k.set_defaults(func=cmd_kernelize)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--samples", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="print a tree pair: 'tight K', 'random N SEED', 'caterpillar N'")
    g.add_argument("kind", choices=("tight", "random", "caterpillar"))
    g.add_argument("params", nargs="*")
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except _Exit as exc:
        print(f"error={exc}", file=sys.stderr)
        code = exc.code
    if args.command != "verify":
        print(f"wall_time_s={time.perf_counter() - t0:.3f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
