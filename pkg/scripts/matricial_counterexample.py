"""Transpose minus identity on M_2: dissipative, but not completely dissipative.

Prints the level-by-level verdicts and the growth of the flip operator under
exp(t delta_2) next to its closed form (see ``flip_norm``).
"""

from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

from qdslab.algebra import Algebra
from qdslab.dissipativity import certify_completely_dissipative
from qdslab.generators import Superoperator, transpose_map


@dataclass
class Config:
    n_max: int = 3
    seed: int = 0
    times: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0)


def flip_norm(t: float) -> float:
    """Norm of exp(t delta_2)(F) for the flip F = sum_ij E_ij (x) E_ji.

    exp(t delta) = e^{-t}(cosh t id + sinh t T) and T_2(F) = 2 |w><w| with
    w = (e_00 + e_11)/sqrt(2). F is +1 on symmetric and -1 on antisymmetric
    vectors, so the image has eigenvalue e^{-t}(cosh t + 2 sinh t) on w and
    +-e^{-t} cosh t elsewhere: norm (3 - e^{-2t}) / 2.
    """
    return (3 - math.exp(-2 * t)) / 2


def run(cfg: Config) -> dict:
    Q = Algebra((2,))
    delta = transpose_map(Q) - Superoperator.identity(Q)
    rep = certify_completely_dissipative(delta, n_max=cfg.n_max, t_grid=cfg.times, seed=cfg.seed)
    flips = rep.level(2).details["probe_norms"]["flip"]
    return {
        "config": asdict(cfg),
        "levels": {lv.n: ("pass" if lv.ok else "fail") for lv in rep.levels},
        "flip_norm": {t: {"computed": flips[t], "closed_form": flip_norm(t)} for t in cfg.times},
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=Config.n_max)
    p.add_argument("--seed", type=int, default=Config.seed)
    args = p.parse_args()
    print(json.dumps(run(Config(n_max=args.n_max, seed=args.seed)), indent=2))


if __name__ == "__main__":
    main()
