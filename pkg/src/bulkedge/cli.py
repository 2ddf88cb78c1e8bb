"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when any bound or invariant check
fails, 2 on usage errors (bad flags, invalid configs or parameters).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import BulkEdgeError
from .runner import RunReport, Scenario, _run_ref, builtin_scenarios, emit_report, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--model", default="haldane", help="haldane (= haldane_plus), haldane_minus, wallace, ...")
    p.add_argument("--s", type=float, default=0.5, help="second-neighbour strength in [0, 1]")
    p.add_argument("--n", type=int, default=24, help="torus side length")
    p.add_argument("--domain", default=None, help="domain descriptor, e.g. strip:L=2")
    p.add_argument("--nu", type=float, default=0.25, help="short-range parameter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory (default: print JSON to stdout)")
    p.add_argument("--format", default="json", choices=("json", "csv", "plotdata"))
    p.add_argument("--jobs", type=int, default=1, help="concurrent scenarios for `run`")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="bulkedge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common], help="eigenvalues of a bulk or edge operator")

    c = sub.add_parser("conductance", parents=[common], help="real-space conductance and Chern number")
    c.add_argument("--R-tr", dest="R_tr", type=int, default=None)
    c.add_argument("--corner", type=int, nargs=2, default=(0, 0))
    c.add_argument("--grid-n", dest="grid_n", type=int, default=64)

    k = sub.add_parser("constants", parents=[common], help="model constants on a momentum grid")
    k.add_argument("--grid-n", dest="grid_n", type=int, default=512)

    sub.add_parser("bounds-check", parents=[common], help="lattice-sum, norm and kernel estimates")

    sc = sub.add_parser("scan", parents=[common], help="parameter scans")
    sc.add_argument("--kind", choices=("n", "s"), default="n",
                    help="n: half-torus density vs window size; s: edge invertibility vs s")
    sc.add_argument("--values", type=float, nargs="+", default=None)

    r = sub.add_parser("run", parents=[common], help="run builtin scenarios or INI configs")
    r.add_argument("configs", nargs="+", help=f"config paths or builtin names: {', '.join(builtin_scenarios())}")
    return ap


def _scenario_for(args) -> Scenario:
    base = dict(model=args.model, s=args.s, nu=args.nu, n=args.n, domain=args.domain, seed=args.seed)
    cmd = args.command
    if cmd == "spectrum":
        return Scenario("spectrum", operations=[("spectrum", {})], **base)
    if cmd == "conductance":
        p = {"corner": list(args.corner), "grid_n": args.grid_n}
        if args.R_tr is not None:
            p["R_tr"] = args.R_tr
        return Scenario("conductance", operations=[("conductance", p)], **base)
    if cmd == "constants":
        return Scenario("constants", operations=[("constants", {"grid_n": args.grid_n})], **base)
    if cmd == "bounds-check":
        return Scenario("bounds-check", operations=[("bounds", {})], **base)
    if cmd == "scan":
        if args.kind == "n":
            vals = [int(v) for v in (args.values or (16, 24, 32, 48))]
            return Scenario("scan-n", operations=[("n_scan", {"values": vals})], **base)
        vals = list(args.values or (1e-3, 1e-2, 3e-2, 5e-2, 0.1, 0.2, 0.3))
        if base["domain"] is None:
            base["domain"] = "strip:L=2"
        return Scenario("scan-s", operations=[("s_scan", {"values": vals})], **base)
    raise ValueError(cmd)


def _publish(report: RunReport, args) -> None:
    if args.out is None:
        if args.format == "json" or not report.results:
            print(json.dumps(report.to_dict(), indent=1))
        else:
            import tempfile

            with tempfile.TemporaryDirectory() as tmp:
                for p in emit_report(report, args.format, tmp):
                    sys.stdout.write(Path(p).read_text())
    else:
        for p in emit_report(report, args.format, args.out):
            print(p, file=sys.stderr)
    if report.error:
        print(f"error: {report.error}", file=sys.stderr)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "run":
            if args.jobs > 1 and len(args.configs) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    reports = list(pool.map(_run_ref, args.configs))
            else:
                reports = [_run_ref(ref) for ref in args.configs]
        else:
            reports = [run_scenario(_scenario_for(args))]
    except BulkEdgeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for rep in reports:
        _publish(rep, args)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
