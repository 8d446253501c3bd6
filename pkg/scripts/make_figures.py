"""Write the data behind the three bound figures as CSV files.

    python3 scripts/make_figures.py --outdir figures
"""

import argparse
import pathlib
import sys

from fbmbounds import cli

FIGURES = {
    "all_bounds.csv": ["figure", "--which", "all-bounds", "--h-grid", "0.01:0.99:0.01"],
    "mu_compare.csv": ["figure", "--which", "mu-compare", "--h-grid", "0.01:0.5:0.005"],
    "ratio.csv": ["figure", "--which", "ratio", "--h-grid", "0.005:0.5:0.005"],
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="figures")
    parser.add_argument("--mu-half", choices=("reflection", "literal"), default="reflection")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, argv in FIGURES.items():
        code = cli.main(argv + ["--mu-half", args.mu_half, "--out", str(outdir / name)])
        if code != cli.EXIT_OK:
            return code
        print(f"wrote {outdir / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
