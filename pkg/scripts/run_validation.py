"""Run the Monte-Carlo validation suite over several Hurst values and write one CSV report.

    python3 scripts/run_validation.py --hs 0.3 0.4 0.5 0.6 0.7 --out validation.csv
"""

import argparse
import sys

from fbmbounds import bounds as bd
from fbmbounds import cli, mc


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--hs", type=float, nargs="+", default=[0.3, 0.4, 0.5, 0.6, 0.7])
    parser.add_argument("--paths", type=int, default=mc.DEFAULT_PATHS)
    parser.add_argument("--steps", type=int, default=mc.DEFAULT_STEPS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    config = cli.RunConfig(
        command="validate", hs=args.hs, seed=args.seed, paths=args.paths, steps=args.steps,
        output_path=args.out, workers=args.workers, c_half=bd.MU_HALF_REFLECTION,
    )
    code = cli.run_validate(config)
    print("all checks passed" if code == cli.EXIT_OK else "some checks failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
