#!/usr/bin/env python3
"""Render a log-log rate figure from a benchmark JSON report.

Usage: plot_rate.py --report rate.json --exponent -0.25 --out rate.png

The slope is re-fitted from the report's median series and must agree
with the stored fit; mismatched or unversioned reports are refused.
"""

import argparse
import sys

from mcwavelets.plots import PlotError, plot_rate


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--report", required=True, help="JSON report path")
    parser.add_argument("--exponent", type=float, required=True,
                        help="reference slope drawn alongside the fit")
    parser.add_argument("--out", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        plot_rate(args.report, args.exponent, args.out)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
