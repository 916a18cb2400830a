"""Tabulate lower bounds and collapse witnesses for the built-in operator families."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from qabkit.normtool import FAMILIES, witness_collapse


@dataclass
class CollapseConfig:
    families: list = field(default_factory=lambda: list(FAMILIES))
    max_n: int = 10
    tol: float = 1e-9


def main(cfg: CollapseConfig) -> int:
    bad = 0
    for name in cfg.families:
        rep = witness_collapse(FAMILIES[name](), cfg.max_n)
        if not rep.collapsing:
            print(f"{name}: no witness at n={rep.failed_at}, not collapsing")
            continue
        print(f"{name}:")
        print(f"  {'n':>4} {'delta':>12} {'phi(b)':>12} {'p(b)':>12}")
        for w, d in zip(rep.witnesses, rep.deltas):
            bad += not w.satisfies_bounds(cfg.tol)
            print(f"  {w.n:>4} {d:>12.6g} {w.phi_b:>12.9f} {w.p_b:>12.6g}")
    return int(bad > 0)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--families", nargs="+", default=CollapseConfig().families, choices=list(FAMILIES))
    ap.add_argument("--max-n", dest="max_n", type=int, default=CollapseConfig.max_n)
    ap.add_argument("--tol", type=float, default=CollapseConfig.tol)
    raise SystemExit(main(CollapseConfig(**vars(ap.parse_args()))))
