"""Tree zeros found from seeds just outside the boundary of U_{delta-1}, around the whole curve."""

import argparse
import math
import time
from dataclasses import dataclass

from hardcore_zeros.errors import NoZeroFound
from hardcore_zeros.zeros import find_tree_zero, outward_seed


@dataclass
class Config:
    delta: int = 3
    points: int = 24
    distance: float = 0.01
    k_max: int = 60


def main(cfg: Config):
    print(f"{'theta':>7} {'seed':>24} {'k':>3} {'lambda*':>26} {'residual':>9} {'dist':>7} check")
    for j in range(cfg.points):
        theta = -math.pi + 2 * math.pi * j / cfg.points
        seed = outward_seed(cfg.delta, theta, cfg.distance)
        t0 = time.perf_counter()
        try:
            w = find_tree_zero(cfg.delta, seed, k_max=cfg.k_max)
        except NoZeroFound:
            print(f"{theta:>7.3f} {seed:>24.5f}  -- no zero found ({time.perf_counter() - t0:.2f} s)")
            continue
        print(f"{theta:>7.3f} {seed:>24.5f} {w.k:>3} {w.lam:>26.6f} {w.residual:>9.1e} "
              f"{w.boundary_distance:>7.4f} {w.validation}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--delta", type=int, default=Config.delta)
    p.add_argument("--points", type=int, default=Config.points)
    p.add_argument("--distance", type=float, default=Config.distance)
    p.add_argument("--kmax", type=int, default=Config.k_max)
    a = p.parse_args()
    main(Config(a.delta, a.points, a.distance, a.kmax))
