"""Classify Q -> Q/Z and show its pullback along each Prufer inclusion."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from qabkit.divkit import quotient_map_report


@dataclass
class ReplayConfig:
    primes: list = field(default_factory=lambda: [2, 3, 5, 7])


def main(cfg: ReplayConfig) -> int:
    flags = None
    for p in cfg.primes:
        rep = quotient_map_report(p)
        flags = rep["classification"]["flags"]
        print(f"p={p}: ambient pullback {rep['ambient_pullback']} (leg epi: {rep['ambient_leg_is_epi']}), "
              f"divisible pullback {rep['div_pullback']} (leg epi: {rep['div_leg_is_epi']})")
    print("flags:", ", ".join(f"{k}={v}" for k, v in flags.items()))
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", nargs="+", type=int, default=ReplayConfig().primes)
    raise SystemExit(main(ReplayConfig(**vars(ap.parse_args()))))
