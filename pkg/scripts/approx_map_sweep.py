"""Error of approx_z at lambda = lam_3 / 2 over substitution parameters, and where the zeros sit.

The sector map lam = -a + a((1+w)/(1-w))^(2 theta/pi) is admissible when no
zero of Z lies in {|arg(lam + a)| < theta}.  The survey part reports, over
random max-degree-3 graphs, the rightmost real part of the zeros and the
smallest |arg(zero + a)|, which bound the usable apex a and angle theta.
"""

import argparse
import cmath
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hardcore_zeros.approx import IdentityMap, SectorMap, approx_z
from hardcore_zeros.dynamics import lambda_critical, shearer_point
from hardcore_zeros.graph import random_graph
from hardcore_zeros.indpoly import roots_univariate, z_coeffs, z_eval


@dataclass
class Config:
    seed: int = 11
    graphs: int = 50
    n_max: int = 16
    order: int = 15
    apexes: list = field(default_factory=lambda: [0.12, shearer_point(3), 0.165])
    thetas: list = field(default_factory=lambda: [1.9, 2.0, 2.05])
    pole_factors: list = field(default_factory=lambda: [None, 3, 4, 6, 8])
    survey_graphs: int = 3000


def sample(cfg, seed):
    rng = random.Random(seed)
    return [random_graph(rng.randint(1, cfg.n_max), 3, rng) for _ in range(cfg.graphs)]


def sweep(cfg: Config):
    lam = 0.5 * lambda_critical(3)
    gs = sample(cfg, cfg.seed)
    exact = [float(z_eval(g, Fraction(lam))) for g in gs]

    def errors(**kw):
        return [abs(approx_z(g, lam, cfg.order, **kw).value - e) / e for g, e in zip(gs, exact)]

    e = errors(substitution=IdentityMap())
    print(f"identity: max {max(e):.2e}")
    for a, th, bf in itertools.product(cfg.apexes, cfg.thetas, cfg.pole_factors):
        sub = SectorMap(a, th)
        e = errors(substitution=sub, degree_pole=(bf * a if bf else 0))
        print(f"apex {a:.4f} theta {th:.2f} pole {bf}: max {max(e):.2e} median {np.median(e):.2e} "
              f"within 1e-3: {sum(x <= 1e-3 for x in e)}/{len(e)}")
    print("default map, error by order:")
    for m in (5, 10, 15, 20, 25):
        e = [abs(approx_z(g, lam, m, delta=3).value - x) / x for g, x in zip(gs, exact)]
        print(f"  m={m:>2}: mean {np.mean(e):.2e} max {max(e):.2e}")


def survey(cfg: Config):
    rng = random.Random(cfg.seed + 1)
    a = shearer_point(3)
    max_re, min_arg = -np.inf, np.inf
    for _ in range(cfg.survey_graphs):
        g = random_graph(rng.randint(2, cfg.n_max), 3, rng)
        c = z_coeffs(g)
        if len(c) < 2:
            continue
        for r in roots_univariate(c, tol=1e-8):
            max_re = max(max_re, r.real)
            min_arg = min(min_arg, abs(cmath.phase(r + a)))
    print(f"zero survey over {cfg.survey_graphs} graphs: max Re = {max_re:.4f}, "
          f"min |arg(zero + {a:.4f})| = {min_arg:.4f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--survey-graphs", type=int, default=Config.survey_graphs)
    p.add_argument("--skip-sweep", action="store_true")
    args = p.parse_args()
    cfg = Config(seed=args.seed, survey_graphs=args.survey_graphs)
    if not args.skip_sweep:
        sweep(cfg)
    survey(cfg)
