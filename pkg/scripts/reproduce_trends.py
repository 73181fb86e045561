"""Trend check on the synthetic corpus: precision vs z, wall time vs p, saturated diversity.

    python3 scripts/reproduce_trends.py --apps 100 --seeds 5
"""

from __future__ import annotations

import argparse
import statistics
import time

from divcar.evaluation import P_ALL, SyntheticSpec, generate_corpus, pick_eval_apps, run_cells


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--apps", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1, help="timings are only comparable at 1")
    args = ap.parse_args()

    eco = generate_corpus(SyntheticSpec())
    apps = pick_eval_apps(eco, args.apps, 0, [3, 4, 5, 6])
    seeds = range(args.seeds)
    t0 = time.perf_counter()
    cells = [(10, 50), (10, 100), (10, 200), (100, 100)]
    res = run_cells(eco, cells, apps, seeds, jobs=args.jobs)
    res.update(run_cells(eco, [(10, P_ALL)], apps, seeds, dedupe=False, jobs=args.jobs))

    print(f"{'z':>4} {'p':>5} {'n':>5} {'mp':>7} {'mr':>7} {'mild':>7} {'wall_s':>8}")
    for (z, p), cell in res.items():
        s = cell.summary()
        print(f"{z:>4} {'all' if p == P_ALL else p:>5} {s['n_instances']:>5} {s['mp']:>7.4f} {s['mr']:>7.4f} "
              f"{s['mild']:>7.4f} {s['mean_wall_s']:>8.4f}")
    walls = [statistics.fmean(r.wall_time_seconds for r in res[(10, p)].reports) for p in (50, 100, 200)]
    print(f"MP rises with z: {res[(100, 100)].summary()['mp'] >= res[(10, 100)].summary()['mp']}")
    print(f"wall time rises with p: {walls[0] < walls[1] < walls[2]}")
    print(f"total {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
