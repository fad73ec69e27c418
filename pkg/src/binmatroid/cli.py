"""Command-line front end.

Exit codes: 0 success/valid, 1 invalid or a failed check, 2 instance too
large for the requested exact method, 64 usage error.  Human-readable
output goes to stdout; machine output is written only to ``--out``.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from binmatroid import __version__, _backend, selftest
from binmatroid.gf2 import random_gl2
from binmatroid.matroid import MalformedReduction, PartitionReduction
from binmatroid.reduction import (
    GuardExceeded,
    check_reduction_exact,
    check_reduction_randomized,
    leading_bit_reduction,
    transform_reduction,
)
from binmatroid.secretary import ConfigError, ExperimentConfig, records_csv, run_experiment
from binmatroid.structure import (
    check_max_part_bound,
    count_pairs,
    covering_number,
    extract_heavy_parts,
    refutation_certificate,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GUARD = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> list[str]:
    if not path:
        return []
    Path(path).write_text(text)
    return [path]


def _manifest(args, command: str, config: dict, outputs: list[str], started: str) -> None:
    if not outputs:
        return
    manifest = {
        "command": command,
        "config": config,
        "seed": args.seed,
        "version": __version__,
        "backend": _backend.NAME,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    Path(outputs[0] + ".manifest.json").write_text(_dump(manifest))


def _table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _load_reduction(args) -> PartitionReduction:
    if args.gen:
        if args.d is None:
            raise UsageError("--gen needs --d")
        if not 1 <= args.d <= 24:
            raise UsageError("--d must lie in 1..24")
        p = leading_bit_reduction(args.d)
        if args.gen == "gl-image":
            p = transform_reduction(p, random_gl2(args.d, np.random.default_rng(args.seed)))
        return p
    if not args.reduction:
        raise UsageError("give a reduction file or --gen")
    try:
        text = sys.stdin.read() if args.reduction == "-" else Path(args.reduction).read_text()
        return PartitionReduction.from_json(text)
    except (OSError, json.JSONDecodeError, MalformedReduction) as exc:
        raise UsageError(f"cannot read reduction: {exc}") from None


def _certify(p: PartitionReduction, args):
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        return check_reduction_randomized(p, args.trials, np.random.default_rng(args.seed))
    return check_reduction_exact(p)


def cmd_verify(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    p = _load_reduction(args)
    try:
        cert = _certify(p, args)
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}")
        return EXIT_GUARD
    print(_table([("d", p.d), ("elements", p.n), ("method", cert.method), ("valid", cert.valid)]))
    if cert.witness:
        print("dependent transversal: " + ", ".join(f"P{i}:{v}" for i, v in cert.witness))
    outputs = _write(args.out, _dump(cert.to_dict()))
    _manifest(args, "verify", {"source": args.reduction or args.gen, "d": p.d}, outputs, started)
    return EXIT_OK if cert.valid else EXIT_INVALID


def cmd_analyze(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    p = _load_reduction(args)
    report: dict = {"d": p.d, "n": p.n}
    if not p.validated:
        try:
            cert = _certify(p, args)
        except GuardExceeded:
            cert = check_reduction_randomized(p, 1000, np.random.default_rng(args.seed))
        report["validity"] = cert.to_dict()
        if not cert.valid:
            if not args.force:
                print("reduction is invalid: " + ", ".join(f"P{i}:{v}" for i, v in cert.witness))
                return EXIT_INVALID
            print("warning: reduction is invalid; bounds below need not hold")
        elif cert.method == "exact":
            p = p.certified()
    holds = {}
    try:
        pairs = count_pairs(p)
        report["residual_pairs"] = pairs.to_dict()
        holds["residual_pairs"] = pairs.holds
    except GuardExceeded as exc:
        report["residual_pairs"] = {"skipped": str(exc)}
    maxpart = check_max_part_bound(p)
    report["max_part"] = maxpart.to_dict()
    holds["max_part"] = maxpart.holds
    heavy = extract_heavy_parts(p)
    report["heavy_parts"] = heavy.to_dict()
    holds["heavy_parts"] = heavy.within_cap and heavy.below_threshold
    report["holds"] = holds
    rows = [("d", p.d), ("elements", p.n), ("max part", p.max_part)]
    if "cross_pairs_total" in report["residual_pairs"]:
        rows += [("pairs into R", f"{pairs.pairs_into_R} <= {pairs.residual_pair_bound}: {pairs.holds}")]
    else:
        rows += [("pairs into R", "skipped (too many elements)")]
    rows += [
        ("max part > c*n/8", f"{maxpart.max_part} > {float(maxpart.bound):.4f}: {maxpart.holds}"),
        ("removed parts", heavy.removed),
        ("removals", f"{heavy.removals} <= {heavy.removal_cap}"),
        ("|T|", len(heavy.t_set)),
        ("final union", f"{heavy.union_size_final} (threshold {heavy.threshold})"),
    ]
    print(_table(rows))
    outputs = _write(args.out, _dump(report))
    _manifest(args, "analyze", {"source": args.reduction or args.gen, "d": p.d}, outputs, started)
    return EXIT_OK if all(holds.values()) or args.force else EXIT_INVALID


def cmd_cover(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    if args.d is None or not 1 <= args.d <= 30:
        raise UsageError("--d must lie in 1..30")
    rng = np.random.default_rng(args.seed)
    report = covering_number(args.d, method=args.method, rng=rng)
    data = {"cover": report.to_dict()}
    print(_table([
        ("d", args.d),
        ("beta", f"{report.beta_num}/{report.beta_den}"),
        ("covering number", report.covering_number),
        ("explicit cover", "verified" if report.cover else "not constructed"),
    ]))
    if report.cover and args.d <= 4:
        for s in report.cover:
            print("  {" + ", ".join(format(v, f"0{args.d}b") for v in s) + "}")
    refutation = None
    if args.refute:
        if args.d > 24:
            raise UsageError("--refute needs d <= 24")
        base = leading_bit_reduction(args.d)
        corpus = [base] + [transform_reduction(base, random_gl2(args.d, rng)) for _ in range(args.images)]
        refutation = refutation_certificate(args.d, corpus)
        data["refutation"] = refutation.to_dict()
        print()
        print(f"(2^d-1)/8 = {refutation.to_dict()['floor']}  vs  2k = {refutation.two_k}: {refutation.verdict}")
        print(f"{'max_part':>10} {'k':>8} {'2k':>8}  verdict")
        for row in refutation.table():
            print(f"{row['max_part']:>10} {row['k']:>8} {row['2k']:>8}  {row['verdict']}")
    if args.format == "csv":
        if refutation is None:
            raise UsageError("--format csv needs --refute")
        text = refutation.to_csv()
    else:
        text = _dump(data)
    outputs = _write(args.out, text)
    _manifest(args, "cover", {"d": args.d, "refute": args.refute, "method": args.method}, outputs, started)
    return EXIT_OK


def _load_config(args) -> ExperimentConfig:
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    for key in ("d", "trials", "algorithm"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.mapping is not None:
        data["mapping"] = {"name": args.mapping}
    if args.sample_size is not None:
        data.pop("fraction", None)
        data["sample_size"] = args.sample_size
    if args.fraction is not None:
        data.pop("sample_size", None)
        data["fraction"] = args.fraction
    if args.check:
        data["check"] = True
    if args.seed is None:
        args.seed = data.get("seed")
        if args.seed is None:
            args.seed = secrets.randbits(32)
    data["seed"] = args.seed
    try:
        return ExperimentConfig.from_dict(data)
    except (ConfigError, TypeError) as exc:
        raise UsageError(f"bad config: {exc}") from None


def cmd_simulate(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    config = _load_config(args)
    report, records = run_experiment(config, jobs=args.jobs, keep_records=True)
    print(_table([
        ("d", report.d),
        ("trials", report.trials),
        ("algorithm", report.algorithm),
        ("mapping", report.mapping),
        ("sample sizes", report.sample_sizes),
        ("mean opt_P", f"{report.mean_opt_P:.6f} +- {report.se_opt_P:.6f}"),
        ("mean opt_M", f"{report.mean_opt_M:.6f} +- {report.se_opt_M:.6f}"),
        ("exact E[opt_M]", f"{report.expected_rank_value:.6f}"),
        ("ratio", f"{report.ratio:.6f} +- {report.std_error:.6f}"),
        ("2 d^(3/4)", f"{report.comparator_opt_P:.4f}"),
        ("per-trial bound", f"{report.bound_checks_passed}/{report.trials} ok"),
    ]))
    text = records_csv(records) if args.format == "csv" else _dump(report.to_dict())
    outputs = _write(args.out, text)
    outputs += _write(args.per_trial, records_csv(records))
    _manifest(args, "simulate", config.to_dict(), outputs, started)
    return EXIT_OK if report.bound_checks_failed == 0 else EXIT_INVALID


def cmd_selftest(args) -> int:
    results = selftest.run(args.seed or 0)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name} ({detail})")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands re-declare the flags with SUPPRESS so values given before
        # the subcommand are not overwritten by defaults
        g = _Parser(add_help=False)
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=dflt(None), help="root seed (default: from config or entropy)")
        g.add_argument("--jobs", type=int, default=dflt(1), help="worker processes for trial loops")
        g.add_argument("--out", default=dflt(None), help="write machine-readable output here")
        g.add_argument("--format", choices=["json", "csv", "table"], default=dflt("json"), help="format of --out")
        return g

    common = global_flags(suppress=True)

    parser = _Parser(prog="binmatroid", description=__doc__.splitlines()[0], parents=[global_flags(False)])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def reduction_args(p):
        p.add_argument("reduction", nargs="?", help='reduction JSON file ({"d":..,"parts":[[..],..]}), or - for stdin')
        p.add_argument("--gen", choices=["leading-bit", "gl-image"], help="generate instead of reading")
        p.add_argument("--d", type=int, help="dimension for --gen")
        p.add_argument("--exact", action="store_true", help="exact check (default)")
        p.add_argument("--trials", type=int, help="randomized check with this many trials")

    p = sub.add_parser("verify", parents=[common], help="certify or falsify a reduction")
    reduction_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[common], help="pair counts, max-part bound, heavy parts")
    reduction_args(p)
    p.add_argument("--force", action="store_true", help="report even if the reduction is invalid")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("cover", parents=[common], help="covering number of B_d minus zero")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--refute", action="store_true", help="compare a reduction corpus against 2k")
    p.add_argument("--images", type=int, default=2, help="GL images in the --refute corpus")
    p.add_argument("--method", choices=["greedy", "field"], default="greedy")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("simulate", parents=[common], help="matroid-secretary experiment")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--d", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--fraction", type=float)
    p.add_argument("--mapping", choices=["leading-bit", "gl-image", "sample-basis"])
    p.add_argument("--algorithm", choices=["partition", "trivial-greedy"])
    p.add_argument("--check", action="store_true", help="validate every mapping output")
    p.add_argument("--per-trial", help="write per-trial CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", parents=[common], help="invariant suite at d <= 4")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.seed is None and args.command != "simulate":  # simulate may take it from its config
        args.seed = secrets.randbits(32)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"binmatroid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
