"""Write the convergence tables used to judge quadrature and MC settings.

For each listed scenario this writes sweep_<scenario>_<parameter>.csv into
the output directory (default: sweeps/):

* ``order``   quadrature order 8..128 for every inequality scenario;
* ``R``       flow radius 2..16 for the volume-check scenarios;
* ``samples`` MC sample count for the hemisphere.
"""

import argparse
import sys
from pathlib import Path

from wulff_willmore import cli

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "acceptance.json"))
    ap.add_argument("--out-dir", default="sweeps")
    ap.add_argument("--samples", type=int, default=200_000, help="MC samples for R sweeps")
    ap.add_argument("--quick", action="store_true", help="order sweeps only")
    args = ap.parse_args(argv)

    config = cli.load_config(args.config)
    names = [sc.name for sc in cli.parse_scenarios(config)]
    jobs = [(n, "order", "8,16,32,64,128") for n in names]
    if not args.quick:
        volume = {c["scenario"] for c in config.get("flow_checks", []) if c["check"] == "volume"}
        jobs += [(n, "R", "2,4,8,16") for n in names if n in volume]
        jobs.append(("hemisphere", "samples", "10000,40000,160000,640000"))
    worst = 0
    for name, param, grid in jobs:
        code = cli.main(["sweep", "--config", args.config, "--scenario", name, "--parameter",
                         param, "--grid", grid, "--samples", str(args.samples),
                         "--out-dir", args.out_dir])
        print(f"{name:36s} {param:8s} exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
