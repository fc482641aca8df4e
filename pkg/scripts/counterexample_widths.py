"""Depth needed by the level-activity counterexample as the activity tube around [0, lam_c] shrinks."""

import argparse
import time
from dataclasses import dataclass, field

from hardcore_zeros.errors import ConstructionFailed
from hardcore_zeros.zeros import build_counterexample, counterexample_to_tree, witness_in_tube


@dataclass
class Config:
    delta: int = 3
    widths: list = field(default_factory=lambda: [1.0, 0.5, 0.2, 0.1, 0.05, 0.02])
    n_max: int = 5000


def main(cfg: Config):
    print(f"{'width':>6} {'N':>5} {'|x_N+1|':>9} {'tube':>5} {'Z residual':>11} {'check':>17} {'sec':>6}")
    for w in cfg.widths:
        t0 = time.perf_counter()
        try:
            wit = build_counterexample(cfg.delta, w, n_max=cfg.n_max)
        except ConstructionFailed as exc:
            print(f"{w:>6} failed: {exc}")
            continue
        tree = counterexample_to_tree(wit)
        print(f"{w:>6} {wit.n:>5} {abs(wit.orbit[-1] + 1):>9.1e} {str(witness_in_tube(wit)):>5} "
              f"{tree.residual:>11.1e} {tree.validation:>17} {time.perf_counter() - t0:>6.1f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--delta", type=int, default=Config.delta)
    p.add_argument("--widths", type=float, nargs="+", default=Config().widths)
    p.add_argument("--n-max", type=int, default=Config.n_max)
    a = p.parse_args()
    main(Config(a.delta, a.widths, a.n_max))
