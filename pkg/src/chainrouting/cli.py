"""``chainrouting`` command line: analyze, simulate, verify, histogram.

Exit codes: 0 success or converged, 2 input error, 3 oscillation,
4 step budget exhausted.  Output goes to stdout unless ``--output`` (or
``--trace`` for simulations) names a file.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from collections import Counter
from typing import Sequence

from .digraph import DigraphError, Role, load_adjacency
from .discovery import (
    ClassKind,
    DiscoveryReport,
    build_all_reports,
    build_report,
    render_csv,
    render_table,
    render_warnings,
)
from .scenario import Mode, ScenarioError, load_scenario, random_scenario
from .simulator import run
from .verify import render_verify, verify_laws

EXIT_OK = 0
EXIT_INPUT = 2


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(f"chainrouting: {msg}", file=sys.stderr)


def _load(path: str, role: str):
    return load_adjacency(path, Role(role))


# ---- analyze --------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        d = _load(args.matrix, args.role)
    except (OSError, DigraphError) as exc:
        _err(f"{args.matrix}: {exc}")
        return EXIT_INPUT
    if args.all_pairs:
        reports = build_all_reports(d, args.max_chain_size)
    else:
        if args.origin not in d.labels:
            _err(f"unknown origin {args.origin!r}; labels: {' '.join(d.labels)}")
            return EXIT_INPUT
        reports = [build_report(d, args.origin, args.max_chain_size)]
    text = render_csv(reports) if args.format == "csv" else render_table(reports)
    _emit(text, args.output)
    warnings = render_warnings(reports)
    if warnings:
        sys.stderr.write(warnings)
    return EXIT_OK


# ---- simulate -------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    if args.max_ticks < 0:
        _err("--max-ticks must be non-negative")
        return EXIT_INPUT
    try:
        if args.scenario is not None:
            scn = load_scenario(args.scenario)
        elif args.seed is not None:
            scn = random_scenario(args.seed, n=args.nodes)
        else:
            _err("give a scenario file or bundled name, or --seed")
            return EXIT_INPUT
        if args.mode:
            scn = scn.with_mode(Mode(args.mode))
            scn.validate()
    except ScenarioError as exc:
        _err(f"{args.scenario or 'random scenario'}: {exc}")
        return EXIT_INPUT
    result = run(scn, max_ticks=args.max_ticks)
    if args.trace:
        _emit(result.trace.dumps(), args.trace)
    elif args.show_trace:
        sys.stdout.write(result.trace.dumps())
    print(f"{scn.name or 'scenario'}: {result.summary()}")
    return result.exit_code


# ---- verify ---------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> int:
    rep = verify_laws(args.n_max)
    _emit(render_verify(rep), args.output)
    return EXIT_OK if rep.passed else 1


# ---- histogram ------------------------------------------------------------

def aggregate_histogram(reports: Sequence[DiscoveryReport]) -> tuple[dict[int, int], int, int]:
    """Height buckets over all classifications.

    Arc-only destinations land in the height-1 bucket; the second value is
    their sub-count.  The third counts classifications left out (bridges
    and unreachable destinations).
    """
    buckets: Counter[int] = Counter()
    arc_only = excluded = 0
    for r in reports:
        for c in r.per_destination.values():
            if c.kind is ClassKind.CHAIN:
                buckets[c.height] += 1
            elif c.kind is ClassKind.ARC_ONLY:
                buckets[1] += 1
                arc_only += 1
            else:
                excluded += 1
    return dict(sorted(buckets.items())), arc_only, excluded


def render_histogram_csv(buckets: dict[int, int], arc_only: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["height", "count", "arc_only"])
    for h, n in buckets.items():
        w.writerow([h, n, arc_only if h == 1 else 0])
    return buf.getvalue()


def render_histogram_text(buckets: dict[int, int], arc_only: int, excluded: int) -> str:
    if not buckets:
        return f"no classifications (excluded {excluded})\n"
    width = max(len(str(n)) for n in buckets.values())
    scale = max(buckets.values())
    lines = []
    for h, n in buckets.items():
        dark = arc_only if h == 1 else 0
        bar_len = round(40 * n / scale)
        dark_len = round(40 * dark / scale)
        bar = "#" * dark_len + "=" * (bar_len - dark_len)
        extra = f"  ({dark} arc-only)" if dark else ""
        lines.append(f"{h:>3}  {str(n).rjust(width)}  {bar}{extra}")
    lines.append(f"excluded (bridge or unreachable): {excluded}")
    return "\n".join(lines) + "\n"


def cmd_histogram(args: argparse.Namespace) -> int:
    reports: list[DiscoveryReport] = []
    loaded = 0
    for path in args.matrices:
        try:
            d = _load(path, args.role)
        except (OSError, DigraphError) as exc:
            _err(f"warning: skipping {path}: {exc}")
            continue
        loaded += 1
        reports.extend(build_all_reports(d, args.max_chain_size))
    if not loaded:
        _err("no input file could be parsed")
        return EXIT_INPUT
    buckets, arc_only, excluded = aggregate_histogram(reports)
    if args.format == "text":
        text = render_histogram_text(buckets, arc_only, excluded)
    else:
        text = render_histogram_csv(buckets, arc_only)
    _emit(text, args.output)
    return EXIT_OK


# ---- parser ---------------------------------------------------------------

def _n_max(value: str) -> int:
    k = int(value)
    if not 2 <= k <= 10:
        raise argparse.ArgumentTypeError("must lie in 2..10")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainrouting", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    roles = [r.value for r in Role]

    a = sub.add_parser("analyze", help="classify destinations by chain height")
    a.add_argument("matrix", help="adjacency-matrix file")
    who = a.add_mutually_exclusive_group(required=True)
    who.add_argument("--origin", help="origin vertex label")
    who.add_argument("--all-pairs", action="store_true", help="one row per origin")
    a.add_argument("--format", choices=["table", "csv"], default="table")
    a.add_argument("--role", choices=roles, default=Role.GENERIC.value)
    a.add_argument("--max-chain-size", type=int, default=7)
    a.add_argument("--output", "-o")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="run a routing scenario")
    s.add_argument("scenario", nargs="?", help="scenario file or bundled scenario name")
    s.add_argument("--seed", type=int, help="simulate a seeded random scenario instead")
    s.add_argument("--nodes", type=int, default=6, help="size of the random scenario")
    s.add_argument("--mode", choices=[m.value for m in Mode], help="override the scenario mode")
    s.add_argument("--max-ticks", type=int, default=1000)
    s.add_argument("--trace", help="write the event trace to this file")
    s.add_argument("--show-trace", action="store_true", help="print the trace to stdout")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check complete-order counting laws")
    v.add_argument("--n-max", type=_n_max, default=7)
    v.add_argument("--output", "-o")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("histogram", help="chain-height frequencies over all origins")
    h.add_argument("matrices", nargs="+", help="adjacency-matrix files")
    h.add_argument("--origin-all", action="store_true",
                   help="analyze every origin (always the case; accepted for clarity)")
    h.add_argument("--format", choices=["csv", "text"], default="csv")
    h.add_argument("--role", choices=roles, default=Role.GENERIC.value)
    h.add_argument("--max-chain-size", type=int, default=7)
    h.add_argument("--output", "-o")
    h.set_defaults(func=cmd_histogram)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
