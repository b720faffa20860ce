"""Data-generating models, ground-truth calibration and Monte Carlo studies."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ._seeding import default_threads, derive_rng, derive_seed
from .core import PairedSample, xi
from .exceptions import ConfigMismatchError, DegeneracyExhaustedError, DegenerateSampleError, InvalidInputError
from .resampling import bootstrap_variance, confidence_interval
from .selection import Cluster, MSelectionRule, select_m


@dataclass(frozen=True)
class Gaussian:
    rho: float = 0.0

    def __post_init__(self):
        if not -1 < self.rho < 1:
            raise InvalidInputError(f"rho must lie in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class StudentT:
    nu: float = 3.0
    rho: float = 0.0

    def __post_init__(self):
        if not self.nu > 0:
            raise InvalidInputError(f"nu must be positive, got {self.nu}")
        if not -1 < self.rho < 1:
            raise InvalidInputError(f"rho must lie in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class PoissonMixture:
    lam: float = 2.0
    rho: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidInputError(f"lambda must be positive, got {self.lam}")
        if not 0 <= self.rho < 1:
            raise InvalidInputError(f"rho must lie in [0, 1), got {self.rho}")


ModelSpec = Gaussian | StudentT | PoissonMixture

MODEL_NAMES = {Gaussian: "gaussian", StudentT: "t", PoissonMixture: "poisson"}


def model_to_dict(model: ModelSpec) -> dict:
    return {"model": MODEL_NAMES[type(model)], **asdict(model)}


def model_from_dict(d: dict) -> ModelSpec:
    d = dict(d)
    name = d.pop("model")
    cls = {v: k for k, v in MODEL_NAMES.items()}.get(name)
    if cls is None:
        raise InvalidInputError(f"unknown model {name!r}")
    return cls(**d)


def tau_from_rho(rho: float) -> float:
    """Mixing weight tau with Corr(X, tau X + (1 - tau) Z) = rho."""
    if not 0 <= rho < 1:
        raise InvalidInputError(f"rho must lie in [0, 1), got {rho}")
    if rho == 0:
        return 0.0
    t = rho / math.sqrt(1.0 - rho * rho)
    return t / (1.0 + t)


def rho_from_tau(tau: float) -> float:
    return tau / math.sqrt(tau * tau + (1.0 - tau) ** 2)


def _correlated_normals(rng, rho, n):
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    return z1, rho * z1 + math.sqrt(1.0 - rho * rho) * z2


def generate_sample(model: ModelSpec, n: int, rng=None) -> PairedSample:
    """Draw n iid pairs from ``model``.

    Besides the built-in specs, any object with a ``sample(n, rng)`` method
    returning ``(xs, ys)`` is accepted, which lets calibration run on
    user-defined laws.
    """
    if n < 2:
        raise InvalidInputError("n must be at least 2")
    rng = np.random.default_rng(rng)
    if isinstance(model, Gaussian):
        x, y = _correlated_normals(rng, model.rho, n)
    elif isinstance(model, StudentT):
        x, y = _correlated_normals(rng, model.rho, n)
        # one chi-square divisor per pair makes the vector jointly t
        scale = np.sqrt(rng.chisquare(model.nu, n) / model.nu)
        x, y = x / scale, y / scale
    elif isinstance(model, PoissonMixture):
        tau = tau_from_rho(model.rho)
        x = rng.poisson(model.lam, n).astype(np.float64)
        z = rng.poisson(model.lam, n).astype(np.float64)
        y = tau * x + (1.0 - tau) * z
    elif hasattr(model, "sample"):
        x, y = model.sample(n, rng)
    else:
        raise InvalidInputError(f"unknown model {model!r}")
    return PairedSample(x, y)


@dataclass(frozen=True)
class CalibrationResult:
    model: ModelSpec
    xi_hat: float
    sigma_sq_hat: float
    n_cal: int
    M_cal: int
    xi_se: float
    sigma_sq_se: float
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = model_to_dict(self.model)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationResult":
        d = dict(d)
        d["model"] = model_from_dict(d["model"])
        return cls(**d)


def _xi_copy(model, n, seed, k, max_retries=100):
    rng = derive_rng(seed, k)
    for _ in range(max_retries):
        try:
            return xi(generate_sample(model, n, rng), rng)
        except DegenerateSampleError:
            continue
    raise DegenerateSampleError(f"copy {k}: {max_retries} consecutive degenerate samples")


def xi_copies(model: ModelSpec, n: int, M: int, seed: int, threads: int | None = None) -> np.ndarray:
    """M independent copies of xi_n, copy k drawn from the stream (seed, k)."""
    threads = threads or default_threads()
    if threads <= 1:
        return np.array([_xi_copy(model, n, seed, k) for k in range(M)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(lambda k: _xi_copy(model, n, seed, k), range(M))))


def calibrate_truth(model: ModelSpec, n_cal: int = 20000, M_cal: int = 5000, seed: int = 0, threads: int | None = None) -> CalibrationResult:
    """Simulated population xi and limiting variance of sqrt(n)(xi_n - E xi_n).

    xi_hat is the mean of the copies and sigma_sq_hat is n_cal times their
    sample variance. The variance standard error uses the normal-theory
    approximation sqrt(2 / (M - 1)) * sigma_sq_hat.
    """
    if n_cal < 2 or M_cal < 2:
        raise InvalidInputError("need n_cal >= 2 and M_cal >= 2")
    copies = xi_copies(model, n_cal, M_cal, seed, threads)
    if copies.min() == copies.max():
        # e.g. Y a strictly monotone function of continuous X
        mean, var = float(copies[0]), 0.0
    else:
        mean, var = float(copies.mean()), float(np.var(copies, ddof=1))
    sigma_sq = n_cal * var
    return CalibrationResult(
        model=model,
        xi_hat=mean,
        sigma_sq_hat=sigma_sq,
        n_cal=n_cal,
        M_cal=M_cal,
        xi_se=math.sqrt(var / M_cal),
        sigma_sq_se=math.sqrt(2.0 / (M_cal - 1)) * sigma_sq,
        seed=seed,
    )


@dataclass(frozen=True)
class StudyConfig:
    model: ModelSpec
    n: int
    M: int = 200
    B: int = 500
    rule: MSelectionRule = field(default_factory=Cluster)
    level: float = 0.95
    seed: int = 0
    max_degenerate_retries: int = 1000

    def __post_init__(self):
        if self.M < 1:
            raise InvalidInputError("M must be at least 1")
        if not 0 < self.level < 1:
            raise InvalidInputError("level must lie in (0, 1)")
        if self.n < 4:
            raise InvalidInputError("n must be at least 4")


@dataclass(frozen=True)
class RunRecord:
    run: int
    xi_n: float
    chosen_m: int
    sigma_star_sq: float
    ci_low: float
    ci_high: float
    covered: bool


@dataclass
class StudyReport:
    rmse: float
    rrmse: float
    coverage: float
    coverage_se: float
    mean_ci_length: float
    n_failed: int
    records: list[RunRecord]
    truth_xi: float
    truth_sigma_sq: float

    @classmethod
    def from_records(cls, records: list[RunRecord], truth: CalibrationResult, n_failed: int = 0) -> "StudyReport":
        if not records:
            nan = float("nan")
            return cls(nan, nan, nan, nan, nan, n_failed, [], truth.xi_hat, truth.sigma_sq_hat)
        est = np.array([r.sigma_star_sq for r in records])
        rmse = float(np.sqrt(np.mean((est - truth.sigma_sq_hat) ** 2)))
        cov = float(np.mean([r.covered for r in records]))
        return cls(
            rmse=rmse,
            rrmse=rmse / truth.sigma_sq_hat,
            coverage=cov,
            coverage_se=math.sqrt(cov * (1 - cov) / len(records)),
            mean_ci_length=float(np.mean([r.ci_high - r.ci_low for r in records])),
            n_failed=n_failed,
            records=records,
            truth_xi=truth.xi_hat,
            truth_sigma_sq=truth.sigma_sq_hat,
        )


# (sample, seed) -> (chosen m, sigma*^2)
VarianceEstimator = Callable[[PairedSample, int], tuple[int, float]]


def _rule_estimator(cfg: StudyConfig, threads) -> VarianceEstimator:
    def estimate(sample, seed):
        trace = select_m(sample, cfg.rule, cfg.B, seed, threads, cfg.max_degenerate_retries)
        return trace.chosen_m, bootstrap_variance(trace.chosen)

    return estimate


def run_study(cfg: StudyConfig, truth: CalibrationResult, threads: int | None = None, estimator: VarianceEstimator | None = None) -> StudyReport:
    """Repeat sample -> choose m -> sigma*^2 -> interval, M times.

    Run k draws its data from stream (seed, k, 0) and its bootstrap from
    (seed, k, 1). Runs whose bootstrap cannot find valid subsamples are
    dropped and counted in ``n_failed``.
    """
    if truth.model != cfg.model:
        raise ConfigMismatchError(f"calibration is for {truth.model!r}, study uses {cfg.model!r}")
    estimator = estimator or _rule_estimator(cfg, threads)
    records = []
    failed = 0
    for k in range(cfg.M):
        rng = derive_rng(cfg.seed, k, 0)
        try:
            sample = generate_sample(cfg.model, cfg.n, rng)
            xi_n = xi(sample, rng)
            m, sigma_sq = estimator(sample, derive_seed(cfg.seed, k, 1))
        except (DegenerateSampleError, DegeneracyExhaustedError):
            failed += 1
            continue
        est = confidence_interval(xi_n, math.sqrt(sigma_sq), cfg.n, cfg.level)
        records.append(
            RunRecord(
                run=k,
                xi_n=xi_n,
                chosen_m=int(m),
                sigma_star_sq=sigma_sq,
                ci_low=est.ci_low,
                ci_high=est.ci_high,
                covered=bool(est.ci_low <= truth.xi_hat <= est.ci_high),
            )
        )
    return StudyReport.from_records(records, truth, failed)
