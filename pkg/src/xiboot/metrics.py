"""Distances between one-dimensional empirical distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .exceptions import InvalidInputError


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Equal-weight point masses; atoms are stored sorted."""

    atoms: np.ndarray

    def __post_init__(self):
        a = np.sort(np.asarray(self.atoms, dtype=np.float64).reshape(-1))
        if a.size == 0:
            raise InvalidInputError("empirical distribution needs at least one atom")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("atoms must be finite")
        object.__setattr__(self, "atoms", a)

    def __len__(self):
        return int(self.atoms.size)

    def cdf(self, x):
        """Right-continuous CDF."""
        return np.searchsorted(self.atoms, x, side="right") / self.atoms.size


def _coerce(a) -> EmpiricalDistribution:
    if isinstance(a, EmpiricalDistribution):
        return a
    atoms = getattr(a, "atoms", a)
    return EmpiricalDistribution(atoms)


def kolmogorov_distance(a, b) -> float:
    """sup_x |F_a(x) - F_b(x)|.

    Both CDFs are step functions, so the supremum is attained at one of the
    pooled atoms; each is evaluated there by binary search on the sorted
    atoms, O((B_a + B_b) log(B_a + B_b)) overall.
    """
    a, b = _coerce(a), _coerce(b)
    pts = np.concatenate((a.atoms, b.atoms))
    ca = np.searchsorted(a.atoms, pts, side="right")
    cb = np.searchsorted(b.atoms, pts, side="right")
    return float(np.max(np.abs(ca / a.atoms.size - cb / b.atoms.size)))


def kolmogorov_to_normal(a, sigma: float) -> float:
    """sup_x |F_a(x) - Phi(x / sigma)|, checking both one-sided limits at each atom."""
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    a = _coerce(a)
    values, counts = np.unique(a.atoms, return_counts=True)
    upper = np.cumsum(counts) / a.atoms.size
    lower = upper - counts / a.atoms.size
    phi = ndtr(values / sigma)
    return float(max(np.max(np.abs(upper - phi)), np.max(np.abs(lower - phi))))


def wasserstein_p(a, b, p: float = 2.0) -> float:
    """Order-p Wasserstein distance via the quantile coupling.

    With equal atom counts this is the L_p mean of sorted differences. With
    unequal counts the piecewise-constant quantile functions are integrated
    exactly over the merged breakpoints k / (B_a * B_b).
    """
    if not p >= 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    a, b = _coerce(a), _coerce(b)
    na, nb = a.atoms.size, b.atoms.size
    if na == nb:
        diffs = np.abs(a.atoms - b.atoms)
        weights = np.full(na, 1.0 / na)
    else:
        # breakpoints on the integer grid 0..na*nb
        grid = np.union1d(np.arange(na + 1) * nb, np.arange(nb + 1) * na)
        left = grid[:-1]
        weights = np.diff(grid) / (na * nb)
        diffs = np.abs(a.atoms[left // nb] - b.atoms[left // na])
    if np.all(diffs == 0):
        return 0.0
    return float(np.sum(weights * diffs**p) ** (1.0 / p))
