"""hydrofig: render figures from persisted run artifacts.

    hydrofig cauchy    --pairs pair_table.csv [--summary summary.json] --out fig.png
    hydrofig energy    --energy energy.csv --summary summary.json --out fig.png
    hydrofig interface --trajectory trajectory.jsonl --out fig.png

Exit status 0 on success, 1 on malformed inputs (stderr names the missing
column or key).
"""

import argparse
import sys

from .render import FigureSpec, MissingColumn, render


def _build_parser():
    parser = argparse.ArgumentParser(prog="hydrofig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True)

    cauchy = sub.add_parser("cauchy", help="log-log Cauchy-rate figure with fitted slope")
    cauchy.add_argument("--pairs", required=True)
    cauchy.add_argument("--summary")
    cauchy.add_argument("--out", required=True)

    energy = sub.add_parser("energy", help="E_total(t) with the fitted log bound")
    energy.add_argument("--energy", required=True)
    energy.add_argument("--summary", required=True)
    energy.add_argument("--out", required=True)

    interface = sub.add_parser("interface", help="interface snapshots from a trajectory")
    interface.add_argument("--trajectory", required=True)
    interface.add_argument("--out", required=True)
    return parser


def parse_and_dispatch(argv):
    args = _build_parser().parse_args(argv)
    inputs = {}
    for role in ("pairs", "summary", "energy", "trajectory"):
        value = getattr(args, role, None)
        if value:
            inputs[role] = value
    spec = FigureSpec(kind=args.kind, inputs=inputs, out=args.out)
    try:
        result = render(spec)
    except (MissingColumn, FileNotFoundError) as exc:
        print(f"hydrofig: {exc}", file=sys.stderr)
        return 1
    summary = ", ".join(f"{k}={v}" for k, v in result.annotations.items())
    print(f"wrote {result.out} ({summary})")
    return 0


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))
