"""Write plot-ready tables of the root branches versus P and of the small-beta ladder.

    python scripts/degeneracy_scan.py --beta 0.5 --outdir out/
"""

import argparse
from pathlib import Path

from gupnl import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--P-max", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=201)
    ap.add_argument("--outdir", type=Path, default=Path("."))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    scan = cli.scan_rows(-args.P_max, args.P_max, args.steps, cli.GupParams(args.beta))
    (args.outdir / "roots_vs_P.csv").write_text(cli.to_csv(scan, 12))

    ladder = cli.limit_rows(1.0, 1e-2, 10, 4)
    (args.outdir / "small_beta_ladder.csv").write_text(cli.to_csv(ladder, 12))
    print(f"wrote {len(scan)} + {len(ladder)} rows to {args.outdir}")


if __name__ == "__main__":
    main()
