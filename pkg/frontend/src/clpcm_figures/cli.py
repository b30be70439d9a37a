"""Command-line wrapper: render one figure from a run-artifact directory."""

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, render


def build_parser():
    ap = argparse.ArgumentParser(
        prog="clpcm-figures",
        description="Render figures from clpcm run artifacts")
    ap.add_argument("--artifacts", required=True,
                    help="run output directory")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--G", type=int, default=None,
                    help="conditioning component count for pie-positions "
                         "(default: modal G)")
    ap.add_argument("--out", required=True, help="output SVG path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(FigureSpec(artifacts=Path(args.artifacts),
                                kind=args.kind, output=Path(args.out),
                                G=args.G))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
