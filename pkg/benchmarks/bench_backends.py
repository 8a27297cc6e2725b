"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--N 100,200,400,800] [--repeats 5]

Reports per-backend runtimes of the GM trajectory stage, the full GM plan
and the CI solver, the fitted log-log slopes, the numba speedup, and the
largest waypoint difference between the two backends.
"""
import argparse
import sys

import numpy as np

from uavcovert import _backend, ci, gm, harness
from uavcovert.model import Scenario


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", default="100,200,400,800")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--csv", default=None, help="also write the combined table here")
    args = ap.parse_args(argv)
    n_list = [int(n) for n in args.N.split(",")]
    backends = _backend.available_backends()
    if "numba" not in backends:
        print("numba unavailable; only the numpy path can be timed", file=sys.stderr)

    tables = {}
    for name in backends:
        with _backend.use_backend(name):
            tables[name] = harness.bench_scaling(n_list, repeats=args.repeats)

    keys = ("gm_trajectory_s", "gm_total_s", "ci_total_s")
    print(f"{'N':>6} {'backend':>8} " + " ".join(f"{k:>16}" for k in keys))
    for i, N in enumerate(n_list):
        for name, t in tables.items():
            print(f"{N:>6} {name:>8} " + " ".join(f"{t.rows[i][k]:>16.6f}" for k in keys))
    for name, t in tables.items():
        print(f"slopes[{name}]: " + ", ".join(f"{k}={v:.3f}" for k, v in t.slopes.items() if v is not None))
    if len(tables) == 2:
        fast, slow = tables["numba"].rows, tables["numpy"].rows
        for i, N in enumerate(n_list):
            ratios = ", ".join(f"{k}: {slow[i][k] / fast[i][k]:.1f}x" for k in keys)
            print(f"speedup N={N}: {ratios}")

        sc = Scenario.paper_default()
        wp = {}
        for name in backends:
            with _backend.use_backend(name):
                wp[name] = (gm.plan_trajectory(sc).waypoints, ci.bcd_solve(sc).trajectory.waypoints)
        print("max |numba - numpy| waypoint difference: GM %.3g m, CI %.3g m" % (
            np.abs(wp["numba"][0] - wp["numpy"][0]).max(),
            np.abs(wp["numba"][1] - wp["numpy"][1]).max(),
        ))

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("backend,N," + ",".join(keys) + "\n")
            for name, t in tables.items():
                for r in t.rows:
                    fh.write(f"{name},{r['N']}," + ",".join(repr(r[k]) for k in keys) + "\n")


if __name__ == "__main__":
    main()
