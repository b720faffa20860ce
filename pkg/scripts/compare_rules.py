"""rRMSE of sigma*^2 under different rules for m, on one model.

Compares fixed powers n^0.5 and n^0.7, Bickel-Sakov with q = 0.5 and
the cluster rule on the default grid.
"""

import argparse
from dataclasses import dataclass

from xiboot.selection import BickelSakov, Cluster, FixedPower
from xiboot.simulation import Gaussian, PoissonMixture, StudyConfig, calibrate_truth, run_study

RULES = {
    "sqrt": FixedPower(0.5),
    "n^0.7": FixedPower(0.7),
    "bickel-sakov": BickelSakov(0.5),
    "cluster": Cluster(),
}


@dataclass
class Config:
    discrete: bool = False
    rho: float = 0.5
    n: int = 500
    M: int = 100
    B: int = 500
    seed: int = 11


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--discrete", action="store_true", help="Poisson mixture instead of Gaussian")
    ap.add_argument("--rho", type=float, default=Config.rho)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--M", type=int, default=Config.M)
    ap.add_argument("--B", type=int, default=Config.B)
    a = ap.parse_args()
    cfg = Config(a.discrete, a.rho, a.n, a.M, a.B)

    model = PoissonMixture(2.0, cfg.rho) if cfg.discrete else Gaussian(cfg.rho)
    truth = calibrate_truth(model, 20000, 2000, seed=cfg.seed)
    print(f"{model}  n={cfg.n}  sigma^2={truth.sigma_sq_hat:.4f}")
    for name, rule in RULES.items():
        rep = run_study(StudyConfig(model, n=cfg.n, M=cfg.M, B=cfg.B, rule=rule, seed=cfg.seed), truth)
        ms = sorted(r.chosen_m for r in rep.records)
        print(f"{name:>13}: rRMSE={rep.rrmse:.3f} coverage={rep.coverage:.3f} median m={ms[len(ms) // 2]}")


if __name__ == "__main__":
    main()
