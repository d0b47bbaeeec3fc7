"""Recompute the checked-in true-VUS constants for the built-in scenarios.

    python scripts/pin_truth_constants.py [--draws 100000000] [--seed 20180601]

Writes src/rocsbb/data/scenario_truth.json.
"""

import argparse
import json
import math
import time
from pathlib import Path

import numpy as np

from rocsbb.simulation import SCENARIOS, true_vus, true_vus_integral

OUT = Path(__file__).resolve().parents[1] / "src" / "rocsbb" / "data" / "scenario_truth.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=10**8)
    parser.add_argument("--seed", type=int, default=20180601)
    args = parser.parse_args()

    table = {"mc_draws": args.draws, "seed": args.seed, "scenarios": {}}
    children = np.random.SeedSequence(args.seed).spawn(len(SCENARIOS))
    for (sid, spec), child in zip(sorted(SCENARIOS.items()), children):
        start = time.perf_counter()
        mc = true_vus(spec, args.draws, np.random.default_rng(child))
        quad = true_vus_integral(spec)
        table["scenarios"][str(sid)] = {
            "vus_mc": mc,
            "vus_mc_se": math.sqrt(mc * (1 - mc) / args.draws),
            "vus_quadrature": quad,
            "spec": spec.to_dict(),
        }
        print(f"scenario {sid}: mc={mc:.6f} quad={quad:.6f} ({time.perf_counter() - start:.1f}s)")
    OUT.write_text(json.dumps(table, indent=2) + "\n")


if __name__ == "__main__":
    main()
