"""Command line front end: ``holocurv analyze --spec FILE --out DIR``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .report import EXIT_INVALID, run, write_outputs


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holocurv", description="Holomorphic-metric geometry of complex curves and surfaces.")
    p.add_argument("--version", action="version", version=f"holocurv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="run the analyses listed in a JSON spec")
    a.add_argument("--spec", required=True, help="path to the JSON spec")
    a.add_argument("--out", required=True, help="output directory")
    a.add_argument("--branch", choices=["principal", "other"], help="override the square-root branch")
    a.add_argument("--tol", type=float, help="override the relative vanishing tolerance (tol_rel)")
    a.add_argument("--format", choices=["json", "csv"], default="csv", help="format of locus files")
    return p


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HOLOCURV_THREADS", "1")))
    except ValueError:
        return 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        doc = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not isinstance(doc, dict):
        print("error: spec must be a JSON object", file=sys.stderr)
        return EXIT_INVALID
    report = run(doc, branch=args.branch, tol=args.tol, threads=_threads())
    write_outputs(report, args.out, args.format)
    for d in report.data["diagnostics"]:
        print(f"invalid spec: {d['path'] or '-'}: {d['message']}", file=sys.stderr)
    for w in report.data["warnings"]:
        print(f"warning [{w['code']}] analysis {w['analysis']}: {w['message']}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
