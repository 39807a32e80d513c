#!/usr/bin/env python3
"""Re-derive the frozen constants from their calibration corpora.

Each calibrated constant must be at least twice the worst value observed on
its corpus; analytic constants are checked against their empirical side.
Exits 1 if the frozen table is too tight for the current code.

Phase 1: type-p lower bounds for l^p_N        -> TYPE_CONSTANT
Phase 2: dyadic vs integral Besov seminorms on random Schauder sums -> besov_equivalence_constant
Phase 3: square-function equivalence ratios   -> EQUIVALENCE_RATIO_BAND
Phase 4: embedding block ratios               -> EMBEDDING_BLOCK_BAND

Run:
  python scripts/calibrate_constants.py
  python scripts/calibrate_constants.py --quick --out reports/calibration
"""
import argparse
import sys

from integrability_lab import constants
from integrability_lab.besov import besov_dyadic_seminorm, besov_integral_seminorm
from integrability_lab.dyadic import DyadicGrid, GridFunction
from integrability_lab.experiments import embedding_bound, equivalence_experiment, schauder_series_process
from integrability_lab.gamma import type_p_lower_bound
from integrability_lab.models import BesovParams
from integrability_lab.report_logger import write_report

SAFETY = 2.0


def _spread(values):
    return max(max(v, 1.0 / v) for v in values)


def calibrate_type(seed, trials):
    worst = 1.0
    for p in (1.0, 1.25, 1.5, 1.75, 2.0):
        for N in (4, 8, 16):
            bound = type_p_lower_bound(p, N, trials, seed)
            print(f"  p={p:<5} N={N:<3} lower bound {bound:.4f}")
            worst = max(worst, bound)
    return worst


def calibrate_besov(seed, instances):
    grid = DyadicGrid(1.0, 8)
    corpus = [
        GridFunction(grid, schauder_series_process(grid, 3, 2.0, seed, i).values[:, :, 0], 2.0)
        for i in range(instances)
    ]
    worst = {}
    for s in (0.1, 0.3, 0.5, 0.7, 0.9):
        for q in (1.0, 2.0, 4.0):
            params = BesovParams(s=s, p=2.0, q=q)
            ratios = [besov_dyadic_seminorm(f, params) / besov_integral_seminorm(f, params) for f in corpus]
            worst[(s, q)] = _spread(ratios)
            print(f"  s={s:<4} q={q:<4} worst ratio {worst[(s, q)]:.4f}")
    return worst


def calibrate_equivalence(seed, instances, paths):
    worst = 1.0
    for p in (1.5, 3.0):
        stats = equivalence_experiment(p, 8, 2, instances, paths, seed, grid_level=6, strict=False)
        spread = _spread([row.ratio for row in stats.rows])
        print(f"  p={p:<4} worst ratio {spread:.4f}  spread {stats.spread:.4f}")
        worst = max(worst, spread, stats.spread)
    return worst


def calibrate_embedding(seed, instances, samples):
    worst = 1.0
    grid = DyadicGrid(1.0, 8)
    for p in (1.0, 1.5):
        ratios = []
        for i in range(instances):
            phi = schauder_series_process(grid, 8, p, seed, i)
            result = embedding_bound(phi, p, grid.L - 1, samples, seed)
            if result.block_ratio is not None:
                ratios.append(result.block_ratio)
        spread = _spread(ratios) if ratios else 1.0
        print(f"  p={p:<4} worst block ratio {spread:.4f}")
        worst = max(worst, spread)
    return worst


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0, help="Calibration seed")
    parser.add_argument("--quick", action="store_true", help="Smaller corpora")
    parser.add_argument("--out", help="Write calibration.json into this directory")
    args = parser.parse_args()

    scale = 0.2 if args.quick else 1.0
    instances = max(3, int(30 * scale))
    print(f"Frozen constants version: {constants.FROZEN_CONSTANTS_VERSION}")
    print(f"Seed: {args.seed}  corpus size: {instances}")

    print(f"\n{'=' * 60}\nPhase 1: type constant")
    type_worst = calibrate_type(args.seed, max(10, int(200 * scale)))

    print(f"\n{'=' * 60}\nPhase 2: Besov equivalence")
    besov_worst = calibrate_besov(args.seed, max(20, int(100 * scale)))

    print(f"\n{'=' * 60}\nPhase 3: square-function equivalence")
    equivalence_worst = calibrate_equivalence(args.seed, instances, max(500, int(4000 * scale)))

    print(f"\n{'=' * 60}\nPhase 4: embedding block ratio")
    embedding_worst = calibrate_embedding(args.seed, instances, max(500, int(4000 * scale)))

    verdicts = {
        "type_constant": constants.TYPE_CONSTANT >= SAFETY * type_worst,
        "besov_equivalence": all(
            constants.besov_equivalence_constant(q, s) >= SAFETY * w for (s, q), w in besov_worst.items()
        ),
        "equivalence_ratio_band": constants.EQUIVALENCE_RATIO_BAND >= SAFETY * equivalence_worst,
        "embedding_block_band": constants.EMBEDDING_BLOCK_BAND >= SAFETY * embedding_worst,
    }

    print(f"\n{'=' * 60}")
    for name, ok in verdicts.items():
        print(f"  {name:<26} {'ok' if ok else 'TOO TIGHT'}")

    if args.out:
        write_report(args.out, "calibration", {
            "constants": constants.frozen_constants(),
            "observed": {
                "type_lower_bound": type_worst,
                "besov_ratio": {f"s={s},q={q}": w for (s, q), w in besov_worst.items()},
                "equivalence_ratio": equivalence_worst,
                "embedding_block_ratio": embedding_worst,
            },
            "verdicts": verdicts,
        })
        print(f"Written to {args.out}/calibration.json")

    return 0 if all(verdicts.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
