"""m-out-of-n bootstrap for Chatterjee's rank correlation."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import _kernels
from ._seeding import default_threads, replicate_seeds
from .core import PairedSample
from .exceptions import DegeneracyExhaustedError, DegenerateSampleError, InvalidInputError

# replicates handled per task; fixed so chunking never depends on the thread count
CHUNK = 64


@dataclass(frozen=True)
class BootstrapConfig:
    m: int
    B: int = 2000
    seed: int = 20240101
    max_degenerate_retries: int = 1000

    def validate(self, n: int) -> None:
        if not 2 <= self.m < n:
            raise InvalidInputError(f"subsample size m={self.m} must satisfy 2 <= m < n={n}")
        if self.B < 2:
            raise InvalidInputError(f"B={self.B} must be at least 2")
        if self.max_degenerate_retries < 0:
            raise InvalidInputError("max_degenerate_retries must be non-negative")


@dataclass(frozen=True)
class BootstrapDistribution:
    """Centred bootstrap atoms sqrt(m) * (xi*_m - center).

    ``center`` is the Monte Carlo mean of the B replicate values of xi*_m,
    standing in for the conditional expectation given the data.
    """

    atoms: np.ndarray
    m: int
    center: float
    redraws: int = 0

    @property
    def B(self) -> int:
        return int(self.atoms.size)


@dataclass(frozen=True)
class BootstrapEstimate:
    xi_n: float
    sigma_star_sq: float
    ci_low: float
    ci_high: float
    level: float
    z: float

    @property
    def length(self) -> float:
        return self.ci_high - self.ci_low


def is_degenerate(sample: PairedSample) -> bool:
    ys = np.asarray(sample.ys)
    return bool(ys.size == 0 or np.all(ys == ys[0]))


def draw_subsample(sample: PairedSample, m: int, rng=None) -> PairedSample:
    """m pairs drawn uniformly without replacement."""
    n = sample.n
    if not 2 <= m < n:
        raise InvalidInputError(f"subsample size m={m} must satisfy 2 <= m < n={n}")
    rng = np.random.default_rng(rng)
    idx = rng.choice(n, size=m, replace=False)
    return sample.take(idx)


def _prepare(sample: PairedSample) -> tuple[np.ndarray, np.ndarray, int]:
    order = np.argsort(sample.xs, kind="stable")
    levels, y_dense = np.unique(sample.ys[order], return_inverse=True)
    return sample.xs[order], y_dense.astype(np.int64).reshape(-1), int(levels.size)


def subsample_xis(sample: PairedSample, cfg: BootstrapConfig, threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Raw xi*_m for each replicate plus the number of draws each one used.

    Replicates that exhaust the retry cap come back as NaN.
    """
    cfg.validate(sample.n)
    seeds = replicate_seeds(cfg.seed, cfg.B)
    out = np.empty(cfg.B, np.float64)
    attempts = np.zeros(cfg.B, np.int64)
    x_sorted, y_dense, n_levels = _prepare(sample)

    def run(start):
        stop = min(start + CHUNK, cfg.B)
        _kernels.subsample_xi_block(
            x_sorted, y_dense, n_levels, cfg.m, seeds, start, stop, cfg.max_degenerate_retries, out, attempts
        )

    starts = range(0, cfg.B, CHUNK)
    threads = threads or default_threads()
    if threads <= 1 or cfg.B <= CHUNK:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, starts))
    return out, attempts


def bootstrap_distribution(sample: PairedSample, cfg: BootstrapConfig, threads: int | None = None) -> BootstrapDistribution:
    """Conditional distribution of sqrt(m) * (xi*_m - E[xi*_m | data]).

    Subsamples whose Y values are all equal are redrawn, so every one of
    the B replicates is valid.
    """
    if is_degenerate(sample):
        raise DegenerateSampleError("all Y values are equal; nothing to resample")
    values, attempts = subsample_xis(sample, cfg, threads)
    if np.isnan(values).any():
        b = int(np.flatnonzero(np.isnan(values))[0])
        raise DegeneracyExhaustedError(
            f"replicate {b} found no valid subsample of size {cfg.m} "
            f"in {cfg.max_degenerate_retries + 1} draws"
        )
    center = float(values.mean())
    atoms = math.sqrt(cfg.m) * (values - center)
    return BootstrapDistribution(atoms=atoms, m=cfg.m, center=center, redraws=int(attempts.sum() - cfg.B))


def bootstrap_variance(dist) -> float:
    """Sample variance (B - 1 denominator) of the bootstrap atoms."""
    atoms = dist.atoms if isinstance(dist, BootstrapDistribution) else np.asarray(dist, dtype=float)
    if atoms.size < 2:
        raise InvalidInputError("need at least 2 bootstrap atoms for a variance")
    if atoms.min() == atoms.max():
        return 0.0
    return float(np.var(atoms, ddof=1))


def normal_quantile(p: float) -> float:
    return float(ndtri(p))


def confidence_interval(xi_n: float, sigma_star: float, n: int, level: float = 0.95) -> BootstrapEstimate:
    """Normal-approximation interval xi_n -/+ z * sigma_star / sqrt(n)."""
    if not 0.0 < level < 1.0:
        raise InvalidInputError(f"level={level} must lie in (0, 1)")
    if n < 1:
        raise InvalidInputError("n must be positive")
    if sigma_star < 0:
        raise InvalidInputError("sigma_star must be non-negative")
    z = normal_quantile((1.0 + level) / 2.0)
    half = z * sigma_star / math.sqrt(n)
    return BootstrapEstimate(
        xi_n=xi_n,
        sigma_star_sq=sigma_star * sigma_star,
        ci_low=xi_n - half,
        ci_high=xi_n + half,
        level=level,
        z=z,
    )
