"""Data-driven choice of the subsample size m."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._seeding import derive_seed
from .core import PairedSample, has_ties
from .exceptions import InvalidInputError
from .metrics import kolmogorov_distance
from .resampling import BootstrapConfig, BootstrapDistribution, bootstrap_distribution

DEFAULT_GAMMAS = tuple(round(0.40 + 0.05 * k, 2) for k in range(11))


@dataclass(frozen=True)
class FixedPower:
    gamma: float = 0.5

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise InvalidInputError(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class BickelSakov:
    q: float = 0.5
    m_floor: int = 3

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise InvalidInputError(f"q must lie in (0, 1), got {self.q}")
        if self.m_floor < 2:
            raise InvalidInputError("m_floor must be at least 2")


@dataclass(frozen=True)
class Cluster:
    gammas: tuple[float, ...] = DEFAULT_GAMMAS

    def __post_init__(self):
        g = tuple(float(v) for v in self.gammas)
        if not g:
            raise InvalidInputError("cluster rule needs at least one gamma")
        if any(not 0 < v < 1 for v in g):
            raise InvalidInputError("every gamma must lie in (0, 1)")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise InvalidInputError("gammas must be strictly increasing")
        object.__setattr__(self, "gammas", g)


MSelectionRule = FixedPower | BickelSakov | Cluster


@dataclass
class SelectionTrace:
    """Candidate bootstrap laws, the distances computed between them, and the pick.

    ``pairwise_distances`` holds NaN for pairs the rule never compared.
    """

    candidates: list[BootstrapDistribution]
    pairwise_distances: np.ndarray
    chosen_index: int
    discrete_warning: bool = False
    rule: object = None
    notes: list[str] = field(default_factory=list)

    @property
    def chosen(self) -> BootstrapDistribution:
        return self.candidates[self.chosen_index]

    @property
    def chosen_m(self) -> int:
        return self.chosen.m

    @property
    def candidate_ms(self) -> list[int]:
        return [c.m for c in self.candidates]


def _floor_power(n: int, gamma: float) -> int:
    # guard against n**gamma landing a hair below an exact integer
    return math.floor(n**gamma + 1e-9)


def _clamp(m: int, n: int) -> int:
    return min(max(m, 2), n - 1)


def candidate_ms(rule: MSelectionRule, n: int) -> list[int]:
    if n < 4:
        raise InvalidInputError(f"need n >= 4 to choose m, got {n}")
    if isinstance(rule, FixedPower):
        ms = [_clamp(_floor_power(n, rule.gamma), n)]
    elif isinstance(rule, Cluster):
        ms = sorted({_clamp(_floor_power(n, g), n) for g in rule.gammas})
    elif isinstance(rule, BickelSakov):
        ms = []
        j = 0
        while True:
            m = math.ceil(rule.q**j * n - 1e-9)
            if m < rule.m_floor:
                break
            m = _clamp(m, n)
            if m not in ms:
                ms.append(m)
            j += 1
    else:
        raise InvalidInputError(f"unknown rule {rule!r}")
    if not ms:
        raise InvalidInputError(f"rule {rule!r} yields no admissible m for n={n}")
    return ms


def bickel_sakov_choice(consecutive: np.ndarray) -> int:
    """Smallest j minimising rho(L_j, L_{j+1})."""
    consecutive = np.asarray(consecutive, dtype=float)
    if consecutive.size == 0:
        return 0
    return int(np.argmin(consecutive))


def cluster_choice(distances: np.ndarray) -> int:
    """First index minimising the row sums of the distance matrix."""
    return int(np.argmin(np.asarray(distances, dtype=float).sum(axis=1)))


def _discrete_warning(sample: PairedSample, ms: list[int]) -> bool:
    return has_ties(sample.ys) and max(ms) >= _floor_power(sample.n, 0.5)


def _candidate_laws(sample, ms, B, seed, threads, max_retries):
    return [
        bootstrap_distribution(
            sample,
            BootstrapConfig(m=m, B=B, seed=derive_seed(seed, j), max_degenerate_retries=max_retries),
            threads=threads,
        )
        for j, m in enumerate(ms)
    ]


def select_bickel_sakov(sample: PairedSample, rule: BickelSakov, B: int, seed: int, threads=None, max_retries=1000) -> SelectionTrace:
    ms = candidate_ms(rule, sample.n)
    laws = _candidate_laws(sample, ms, B, seed, threads, max_retries)
    K = len(laws)
    D = np.full((K, K), np.nan)
    np.fill_diagonal(D, 0.0)
    for j in range(K - 1):
        D[j, j + 1] = D[j + 1, j] = kolmogorov_distance(laws[j].atoms, laws[j + 1].atoms)
    J = bickel_sakov_choice(np.array([D[j, j + 1] for j in range(K - 1)]))
    return SelectionTrace(laws, D, J, _discrete_warning(sample, ms), rule)


def select_cluster(sample: PairedSample, rule: Cluster, B: int, seed: int, threads=None, max_retries=1000) -> SelectionTrace:
    ms = candidate_ms(rule, sample.n)
    laws = _candidate_laws(sample, ms, B, seed, threads, max_retries)
    K = len(laws)
    D = np.zeros((K, K))
    for j in range(K):
        for k in range(j + 1, K):
            D[j, k] = D[k, j] = kolmogorov_distance(laws[j].atoms, laws[k].atoms)
    return SelectionTrace(laws, D, cluster_choice(D), _discrete_warning(sample, ms), rule)


def select_fixed(sample: PairedSample, rule: FixedPower, B: int, seed: int, threads=None, max_retries=1000) -> SelectionTrace:
    ms = candidate_ms(rule, sample.n)
    laws = _candidate_laws(sample, ms, B, seed, threads, max_retries)
    return SelectionTrace(laws, np.zeros((1, 1)), 0, _discrete_warning(sample, ms), rule)


def select_m(sample: PairedSample, rule: MSelectionRule, B: int = 2000, seed: int = 0, threads=None, max_retries=1000) -> SelectionTrace:
    if isinstance(rule, Cluster):
        return select_cluster(sample, rule, B, seed, threads, max_retries)
    if isinstance(rule, BickelSakov):
        return select_bickel_sakov(sample, rule, B, seed, threads, max_retries)
    if isinstance(rule, FixedPower):
        return select_fixed(sample, rule, B, seed, threads, max_retries)
    raise InvalidInputError(f"unknown rule {rule!r}")
