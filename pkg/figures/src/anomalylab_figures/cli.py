"""Script entry point: one panel per invocation.

Usage: anomalylab-figures KIND --inputs PATH [PATH ...] --out IMAGE.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PANEL_KINDS, FigureInputError, FigureSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="anomalylab-figures")
    ap.add_argument("kind", choices=PANEL_KINDS)
    ap.add_argument("--inputs", nargs="+", required=True,
                    help="ledger CSVs (or drag-report JSONs for drag_bound)")
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--labels", nargs="*", default=[])
    ap.add_argument("--title", default="")
    ap.add_argument("--xlim", nargs=2, type=float, default=None)
    ap.add_argument("--ylim", nargs=2, type=float, default=None)
    args = ap.parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind, inputs=list(args.inputs), output=args.out,
            labels=args.labels, title=args.title,
            xlim=tuple(args.xlim) if args.xlim else None,
            ylim=tuple(args.ylim) if args.ylim else None,
        )
        out = render(spec)
    except FigureInputError as exc:
        print(f"figure input error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
