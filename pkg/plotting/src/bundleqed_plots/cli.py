"""bundleqed-plot <kind> --in <files> --out <img> [overlay options]."""

import argparse
import sys

from .figures import plot_bars, plot_landscape, plot_ratio_curve, plot_wigner
from .io import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bundleqed-plot",
        description="Render bundleqed CSV/JSON outputs as figures.")
    parser.add_argument("kind", choices=["landscape", "bars", "ratio_curve", "wigner"])
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input file(s); bars accepts several JSONs")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--resonances", default=None,
                        help="landscape: resonance table CSV for position ticks")
    parser.add_argument("--dressed", default=None,
                        help="landscape: dressed-energy CSV for the lower panel")
    parser.add_argument("--zoom", default=None,
                        help="landscape: comma-separated lo:hi energy windows "
                             "(defaults to the sweep's refined windows)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind == "landscape":
            zoom = None
            if args.zoom:
                zoom = [tuple(float(x) for x in chunk.split(":"))
                        for chunk in args.zoom.split(",")]
            plot_landscape(args.inputs[0], args.out, resonances_csv=args.resonances,
                           dressed_csv=args.dressed, zoom=zoom)
        elif args.kind == "bars":
            plot_bars(args.inputs, args.out)
        elif args.kind == "ratio_curve":
            plot_ratio_curve(args.inputs[0], args.out)
        else:
            plot_wigner(args.inputs[0], args.out)
    except (SchemaError, OSError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
