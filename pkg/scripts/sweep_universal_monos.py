"""Compare the universal-mono criterion with brute-force pushout enumeration.

Uses the oracle module from the test suite, so run it from the repository root.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import samplers  # noqa: E402


@dataclass
class SweepConfig:
    max_order: int = 16
    random_homs: int = 400
    random_max_order: int = 8
    seed: int = 41


def main(cfg: SweepConfig) -> int:
    t0 = time.perf_counter()
    monos = samplers.mono_sweep(cfg.max_order)
    extra = samplers.random_hom_sweep(cfg.seed, cfg.random_homs, cfg.random_max_order, cfg.max_order)
    print(f"subgroup inclusions, |B| <= {cfg.max_order}: {monos.agree}/{monos.total} agree")
    print(f"random homs, orders <= {cfg.random_max_order}: {extra.agree}/{extra.total} agree")
    print(f"{time.perf_counter() - t0:.1f}s")
    for d in monos.disagreements + extra.disagreements:
        print("  disagreement:", d)
    return int(bool(monos.disagreements or extra.disagreements))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", dest="max_order", type=int, default=SweepConfig.max_order)
    ap.add_argument("--random-homs", dest="random_homs", type=int, default=SweepConfig.random_homs)
    ap.add_argument("--random-max-order", dest="random_max_order", type=int, default=SweepConfig.random_max_order)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    raise SystemExit(main(SweepConfig(**vars(ap.parse_args()))))
