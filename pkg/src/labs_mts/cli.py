"""Command-line entry point: ``labs-mts <command> ...``.

Exit codes: 0 success, 1 verification failure or no verdict, 2 usage error.
Merit factors print with 4 decimals, runtimes in seconds with 6.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bench, oracle, seqcore, skewsym
from .parallel import ParallelConfig, run_replicas


def _default_targets() -> dict[int, int]:
    return bench.load_targets(oracle.data_path("targets.txt"))


def cmd_solve(args) -> int:
    target = args.target
    if target is None:
        target = _default_targets().get(args.n)
        if target is None:
            raise ValueError(f"no shipped target for n={args.n}; pass --target")
    cfg = ParallelConfig(n=args.n, target_e=target, replicas=args.replicas,
                         scan_workers=args.scan_workers, base_seed=args.seed,
                         max_wall_time=args.time_limit)
    res = run_replicas(cfg)
    record = {
        "n": args.n, "target_e": target, "best_e": res.best_e, "mf": round(res.mf, 4),
        "hex": seqcore.encode_hex(res.best_seq), "reached_target": res.reached_target,
        "iterations": res.iterations, "wall_time": round(res.wall_time, 6),
        "seed": res.seed, "replica_id": res.replica_id, "replicas": args.replicas,
    }
    line = json.dumps(record)
    print(line)
    if args.out:
        with open(args.out, "a") as fh:
            fh.write(line + "\n")
    return 0


def cmd_energy(args) -> int:
    s = seqcore.decode_hex(args.hex, args.n)
    e = seqcore.energy(s)
    print(f"E={e} MF={seqcore.merit_factor(s, e):.4f}")
    return 0


def cmd_skew(args) -> int:
    s = seqcore.decode_hex(args.hex, args.n)
    try:
        d = skewsym.deviation(s, convention=args.convention, budget=args.budget)
    except skewsym.BudgetExceeded as exc:
        print(f"budget-exceeded evaluated={exc.evaluated} upper_bound={exc.upper_bound}")
        return 1
    print(f"d={d}")
    return 0


def cmd_verify(args) -> int:
    entries = oracle.load_table(args.table) if args.table else oracle.published_table()
    report = oracle.verify_published(entries, check_d=not args.no_d, convention=args.convention)
    for r in report.entries:
        e = r.entry
        if r.error:
            print(f"FAIL n={e.n} {e.hex}: {r.error}")
            continue
        d = "" if r.d is None else f" d={r.d}/{e.d}"
        print(f"{'PASS' if r.ok else 'FAIL'} n={e.n} E={r.energy}/{e.energy} "
              f"MF={r.mf:.4f}/{e.mf:.2f}{d}")
    print(f"{len(report.entries) - len(report.failures)}/{len(report.entries)} entries pass")
    return 0 if report.ok else 1


def cmd_oracle(args) -> int:
    e, witnesses = oracle.brute_force_optimum(args.n)
    print(f"n={args.n} optimal_E={e} MF={args.n ** 2 / (2 * e):.4f} classes={len(witnesses)}")
    for w in witnesses:
        print(f"  {seqcore.encode_hex(w)} {w}")
    if args.local_optima:
        print(f"local_optima={oracle.enumerate_local_optima(args.n)}")
    return 0


def cmd_bench(args) -> int:
    targets = bench.load_targets(args.targets) if args.targets else _default_targets()
    template = ParallelConfig(n=2, target_e=0, replicas=args.replicas, base_seed=args.seed,
                              max_wall_time=args.time_limit)
    samples = bench.run_tts(range(args.n_min, args.n_max + 1), targets, args.reps,
                            template, out=args.out)
    for s in bench.summarize(samples):
        if s.all_censored:
            print(f"n={s.n} solved=0 censored={s.censored}")
        else:
            print(f"n={s.n} median={s.median:.6f} q1={s.q1:.6f} q3={s.q3:.6f} "
                  f"solved={s.solved} censored={s.censored}")
    return 0


def cmd_fit(args) -> int:
    samples = bench.read_samples(args.infile)
    fits = bench.fit_sweep(samples, range(args.n_min_fit, args.n_max_fit - 1), args.n_max_fit)
    if not fits or fits[0].n_min_fit != args.n_min_fit:
        raise ValueError(f"need >= 3 solved sizes in [{args.n_min_fit}, {args.n_max_fit}]")
    print("nmin nmax pts  a (95% CI)  b (95% CI)")
    for f in fits:
        print(f.row())
    if args.out:
        with open(args.out, "w") as fh:
            for f in fits:
                fh.write(bench.fit_record(f) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="labs-mts", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run parallel memetic-tabu replicas to a target")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--target", type=int, help="target energy (default: shipped targets)")
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--scan-workers", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--out", help="append the JSON result to this file")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("energy", help="energy and merit factor of a hex sequence")
    s.add_argument("--hex", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("skew", help="deviation from skew-symmetry")
    s.add_argument("--hex", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--budget", type=int, default=None, help="max candidate sequences to score")
    s.add_argument("--convention", choices=skewsym.CONVENTIONS, default="published")
    s.set_defaults(func=cmd_skew)

    s = sub.add_parser("verify", help="check a table of published sequences")
    s.add_argument("--table", help="records 'n hex E MF [d]' (default: shipped table)")
    s.add_argument("--convention", choices=skewsym.CONVENTIONS, default="published")
    s.add_argument("--no-d", action="store_true", help="skip the deviation column")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="exhaustive optimum for small n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--local-optima", action="store_true")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("bench", help="time-to-solution samples over a range of n")
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--targets", help="'n energy' per line (default: shipped targets)")
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--out", help="append samples as JSON lines")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("fit", help="fit median TTS by a*b^n for each window start")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--n-min-fit", type=int, required=True)
    s.add_argument("--n-max-fit", type=int, required=True)
    s.add_argument("--out", help="write fits as JSON lines")
    s.set_defaults(func=cmd_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"labs-mts {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
