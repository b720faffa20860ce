"""Chatterjee's rank correlation and the rank machinery behind it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import DegenerateSampleError, InvalidInputError


@dataclass(frozen=True)
class PairedSample:
    """Observed pairs (x_i, y_i), i = 1..n."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, dtype=np.float64).reshape(-1)
        ys = np.ascontiguousarray(self.ys, dtype=np.float64).reshape(-1)
        if xs.size != ys.size:
            raise InvalidInputError(f"xs and ys differ in length: {xs.size} vs {ys.size}")
        if xs.size < 2:
            raise InvalidInputError(f"need at least 2 pairs, got {xs.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInputError("sample contains NaN or infinite values")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return int(self.xs.size)

    def take(self, idx) -> "PairedSample":
        return PairedSample(self.xs[idx], self.ys[idx])


@dataclass(frozen=True)
class RankProfile:
    """Ranks of Y after ordering the pairs by X.

    ``r[i]`` counts j with Y_(j) <= Y_(i) and ``l[i]`` counts j with
    Y_(j) >= Y_(i). ``order`` is the permutation of the input that produced
    the X-ordering, with ties in X already broken at random.
    """

    r: np.ndarray
    l: np.ndarray
    order: np.ndarray
    x_ties_broken: bool = False
    y_has_ties: bool = False

    @property
    def n(self) -> int:
        return int(self.r.size)


def has_ties(values: np.ndarray) -> bool:
    s = np.sort(values)
    return bool(np.any(s[1:] == s[:-1]))


def compute_ranks(sample: PairedSample, rng=None) -> RankProfile:
    """Sort pairs by X (random order inside blocks of equal X) and rank Y.

    The generator is only consumed when X contains ties, so samples with
    distinct X values give the same profile for every ``rng``.
    """
    if not isinstance(sample, PairedSample):
        sample = PairedSample(*sample)
    x, y = sample.xs, sample.ys
    order = np.argsort(x)
    xs = x[order]
    x_ties = bool(np.any(xs[1:] == xs[:-1]))
    if x_ties:
        # block index of each x plus a uniform key in [0, 1): sorting this
        # keeps blocks in x-order and permutes each block uniformly
        block = np.empty(sample.n, np.float64)
        block[order] = np.concatenate(([0], np.cumsum(xs[1:] != xs[:-1])))
        keys = np.random.default_rng(rng).random(sample.n)
        order = np.argsort(block + keys)
    y_ord = y[order]
    r, l, y_ties = _kernels.rank_profile(y_ord, np.argsort(y_ord))
    return RankProfile(r=r, l=l, order=order, x_ties_broken=x_ties, y_has_ties=bool(y_ties))


def _exact_sum(terms: np.ndarray, bound: int) -> int:
    """Sum non-negative int64 terms, each at most ``bound``, without overflow."""
    if terms.size == 0:
        return 0
    block = max(1, (2**62) // max(bound, 1))
    if block >= terms.size:
        return int(terms.sum(dtype=np.int64))
    starts = np.arange(0, terms.size, block)
    return sum(int(v) for v in np.add.reduceat(terms, starts, dtype=np.int64))


def _rank_jumps(r: np.ndarray) -> int:
    n = r.size
    return _exact_sum(np.abs(np.diff(r)), n)


def xi_no_ties(profile: RankProfile) -> float:
    """1 - 3 * sum|r_{i+1} - r_i| / (n^2 - 1); valid when Y has no ties."""
    n = profile.n
    return 1.0 - 3 * _rank_jumps(profile.r) / (n * n - 1)


def xi_with_ties(profile: RankProfile) -> float:
    """1 - n * sum|r_{i+1} - r_i| / (2 * sum l_i (n - l_i))."""
    n = profile.n
    l = profile.l
    den = 2 * _exact_sum(l * (n - l), n * n // 4 + 1)
    if den == 0:
        raise DegenerateSampleError("all Y values are equal; xi is undefined")
    return 1.0 - n * _rank_jumps(profile.r) / den


def xi(sample: PairedSample, rng=None) -> float:
    """Chatterjee's rank correlation of Y on X.

    Uses the tie-corrected formula whenever Y contains ties. ``rng`` is any
    seed accepted by :func:`numpy.random.default_rng` and is only used to
    break ties in X.

    >>> xi(PairedSample([1, 2, 3, 4], [5, 5, 7, 7]))
    0.5
    """
    if not isinstance(sample, PairedSample):
        sample = PairedSample(*sample)
    if sample.ys.min() == sample.ys.max():
        raise DegenerateSampleError("all Y values are equal; xi is undefined")
    profile = compute_ranks(sample, rng)
    if profile.y_has_ties:
        return xi_with_ties(profile)
    return xi_no_ties(profile)


def tie_counts(sample: PairedSample) -> tuple[int, int]:
    """Number of observations whose X (resp. Y) repeats an earlier value."""
    return (
        sample.n - int(np.unique(sample.xs).size),
        sample.n - int(np.unique(sample.ys).size),
    )
