"""Reproduce the contraction constants: c(delta), y_delta, the grid certificate and the delta in {3, 4} minima."""

import argparse
import time
from dataclasses import dataclass

from hardcore_zeros.contraction import (alpha_delta, c_delta, case34_bound_check, certify_contraction,
                                        y_delta, z_critical)
from hardcore_zeros.dynamics import lambda_critical


@dataclass
class Config:
    deltas: tuple = (3, 4, 5, 6, 7)
    eps: float = 0.1
    resolution: int = 2000
    jobs: int = 1


def main(cfg: Config):
    print(f"{'delta':>5} {'lam_c':>9} {'y':>9} {'z_c':>9} {'c(delta)':>10} {'cert delta':>10} "
          f"{'max eps=0':>10} {'sec':>5}")
    for delta in cfg.deltas:
        t0 = time.perf_counter()
        rep = certify_contraction(delta, cfg.eps, cfg.resolution, jobs=cfg.jobs, raise_on_failure=False)
        parab = certify_contraction(delta, 0.0, cfg.resolution, jobs=cfg.jobs, raise_on_failure=False)
        dt = time.perf_counter() - t0
        print(f"{delta:>5} {lambda_critical(delta):>9.5f} {y_delta(delta):>9.6f} {z_critical(delta):>9.6f} "
              f"{c_delta(delta):>10.5f} {rep.certified_delta:>10.5f} {parab.margin_adjusted_max:>10.5f} {dt:>5.1f}")
    for delta in (3, 4):
        r = case34_bound_check(delta)
        print(f"delta={delta}: alpha={alpha_delta(delta):.5f} relaxed min g'={r.minimum:.5f} "
              f"(closed form {r.closed_form:.5f}), stationary-curve min={r.stationary_minimum:.5f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, default=Config.eps)
    p.add_argument("--resolution", type=int, default=Config.resolution)
    p.add_argument("--jobs", type=int, default=Config.jobs)
    a = p.parse_args()
    main(Config(eps=a.eps, resolution=a.resolution, jobs=a.jobs))
