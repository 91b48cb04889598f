"""Command-line entry point: render one figure from experiment CSV logs."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotSpec, SchemaMismatch, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="difnet-plot",
        description="Render difnet experiment CSVs into figures "
        "(dashed theory, solid simulation)",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        required=True,
        action="append",
        help="input CSV; repeat for kinds with auxiliary files "
        "(eigen_dist accepts the histogram CSV as a second input)",
    )
    parser.add_argument("--out", required=True, help="output image (SVG by default)")
    args = parser.parse_args(argv)
    try:
        render(PlotSpec(kind=args.kind, inputs=tuple(args.inputs), output=args.out))
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
