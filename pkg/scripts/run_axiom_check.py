"""Run the pullback/pushout stability trials for several contexts and write a JSON summary."""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from qabkit.universality import axiom_stability_trial


@dataclass
class AxiomCheckConfig:
    contexts: list = field(default_factory=lambda: ["fin-tors", "lat", "p-local", "div"])
    trials: int = 200
    seed: int = 7
    prime: int = 3
    workers: int = 1
    out: str | None = None


def main(cfg: AxiomCheckConfig) -> int:
    reports = [
        axiom_stability_trial(c, cfg.seed, cfg.trials, p=cfg.prime, workers=cfg.workers).to_json()
        for c in cfg.contexts
    ]
    for r in reports:
        print(f"{r['context']:>9}: completed {r['completed']}, violations {len(r['violations'])}, "
              f"not representable {r['not_representable']}, {r['elapsed_ms'] / 1000:.2f}s")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "reports": reports}, fh, indent=2)
    return int(any(r["violations"] for r in reports))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--contexts", nargs="+", default=AxiomCheckConfig().contexts)
    ap.add_argument("--trials", type=int, default=AxiomCheckConfig.trials)
    ap.add_argument("--seed", type=int, default=AxiomCheckConfig.seed)
    ap.add_argument("--prime", type=int, default=AxiomCheckConfig.prime)
    ap.add_argument("--workers", type=int, default=AxiomCheckConfig.workers)
    ap.add_argument("--out")
    raise SystemExit(main(AxiomCheckConfig(**vars(ap.parse_args()))))
