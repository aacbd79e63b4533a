"""``bnlab-render``: render one experiment CSV into one image."""

from __future__ import annotations

import argparse
import sys

from .render import PLOT_KINDS, PlotSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bnlab-render")
    parser.add_argument("--kind", required=True, choices=PLOT_KINDS)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output", required=True)
    args = parser.parse_args(argv)
    try:
        render(PlotSpec(args.input_csv, args.kind, args.output))
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
