"""First-order convergence of the implicit Euler products (I - (t/n) delta)^{-n}.

For each random Lindblad generator prints the error against exp(t delta) for
n = 8, 16, ... and the ratio under n-doubling (expected to approach 2).
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from qdslab.algebra import Algebra
from qdslab.generators import random_lindblad
from qdslab.semigroup import euler_approximant, exp_generator, superop_distance


@dataclass
class Config:
    generators: int = 10
    dims: tuple[int, ...] = (2, 3)
    t: float = 1.0
    steps: tuple[int, ...] = (8, 16, 32, 64, 128)
    seed: int = 500


def run(cfg: Config) -> list[dict]:
    rows = []
    for k in range(cfg.generators):
        d = cfg.dims[k % len(cfg.dims)]
        delta = random_lindblad(Algebra((d,)), cfg.seed + k)
        exact = exp_generator(delta, cfg.t)
        errs = [superop_distance(euler_approximant(delta, cfg.t, n), exact) for n in cfg.steps]
        rows.append({"seed": cfg.seed + k, "d": d, "errors": errs,
                     "ratios": [a / b for a, b in zip(errs, errs[1:])]})
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--generators", type=int, default=Config.generators)
    p.add_argument("--t", type=float, default=Config.t)
    args = p.parse_args()
    cfg = Config(generators=args.generators, t=args.t)
    print("seed  d  " + "  ".join(f"err(n={n})" for n in cfg.steps) + "  ratios")
    for r in run(cfg):
        errs = "  ".join(f"{e:.3e}" for e in r["errors"])
        ratios = " ".join(f"{x:.3f}" for x in r["ratios"])
        print(f"{r['seed']:4d}  {r['d']}  {errs}  {ratios}")


if __name__ == "__main__":
    main()
