#!/usr/bin/env python3
"""Run the bundled sweeps and print the raw trend statistics.

Used to calibrate the diverging/plateauing thresholds before freezing them
in the configs. Prints per-series means, successive ratios and the full-span
ratio, then the verdict the current thresholds would give.
"""

import sys
import time
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from skomap.config import cusp_config, load_document, parse_seeds, thorn_config
from skomap.cusp import variation_experiment
from skomap.runner import resolve_threads
from skomap.thorn import excursion_variation_experiment, semimartingale_experiment

CONFIGS = Path(__file__).parent.parent / "configs"


def show(report):
    print(f"\n== {report.experiment} ==")
    for s in report.series:
        means = " ".join(f"{m:9.4g}" for m in s.means)
        ratios = " ".join(f"{r:6.3f}" for r in s.successive_ratios)
        print(f"{s.label:>20}  means [{means}]")
        print(f"{'':>20}  ratios [{ratios}]  span {s.span_ratio:.3f}  "
              f"monotone {s.monotone_fraction:.2f}  -> {s.verdict}")
        if s.skipped_seeds:
            print(f"{'':>20}  skipped {len(s.skipped_seeds)} seeds")


def main():
    seeds = parse_seeds(sys.argv[1]) if len(sys.argv) > 1 else None
    threads = resolve_threads(None)

    cusp = cusp_config(load_document(CONFIGS / "cusp_alpha_sweep.json"))
    start = time.time()
    show(variation_experiment(cusp.spec, cusp.alphas, cusp.resolutions, seeds or cusp.seeds,
                              cusp.thresholds, cusp.x0, threads))
    print(f"  ({time.time() - start:.1f}s)")

    thorn = thorn_config(load_document(CONFIGS / "thorn_gamma_sweep.json"))
    start = time.time()
    show(excursion_variation_experiment(thorn.profiles, thorn.resolutions, seeds or thorn.seeds,
                                        thorn.T, thorn.thresholds, thorn.threshold_factor, threads))
    show(semimartingale_experiment(thorn.profiles, thorn.resolutions, seeds or thorn.seeds,
                                   thorn.T, thorn.thresholds, threads))
    print(f"  ({time.time() - start:.1f}s)")


if __name__ == "__main__":
    main()
