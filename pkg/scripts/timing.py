"""Wall time of one bootstrap distribution as n doubles with m = floor(sqrt(n)).

The per-replicate cost is O(m log m), so each doubling of n should cost
roughly a factor sqrt(2) and stay well below 2.
"""

import argparse
import math
import statistics
import time
from dataclasses import dataclass

from xiboot.resampling import BootstrapConfig, bootstrap_distribution
from xiboot.simulation import Gaussian, generate_sample


@dataclass
class Config:
    ns: tuple = (10_000, 20_000, 40_000, 80_000, 160_000)
    B: int = 20_000
    repeats: int = 5
    threads: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--B", type=int, default=Config.B)
    ap.add_argument("--threads", type=int, default=Config.threads)
    a = ap.parse_args()
    cfg = Config(B=a.B, threads=a.threads)

    prev = None
    for n in cfg.ns:
        s = generate_sample(Gaussian(0.5), n, 0)
        m = math.isqrt(n)
        bootstrap_distribution(s, BootstrapConfig(m=m, B=64), threads=cfg.threads)
        times = []
        for r in range(cfg.repeats):
            t0 = time.perf_counter()
            bootstrap_distribution(s, BootstrapConfig(m=m, B=cfg.B, seed=r), threads=cfg.threads)
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        ratio = f"{med / prev:.2f}" if prev else "-"
        print(f"n={n:>7} m={m:>4} median={med:.3f}s ratio={ratio}")
        prev = med


if __name__ == "__main__":
    main()
