"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run just this module with ``pytest tests/test_acceptance.py -v``.
"""

import gc
import io
import math
import re
import statistics
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import brute_kolmogorov, brute_wasserstein, exact_subset_center, record_acceptance
from xiboot._seeding import derive_rng
from xiboot.cli import main
from xiboot.core import PairedSample, compute_ranks, xi, xi_no_ties, xi_with_ties
from xiboot.metrics import kolmogorov_distance, wasserstein_p
from xiboot.resampling import BootstrapConfig, bootstrap_distribution, bootstrap_variance, subsample_xis
from xiboot.selection import Cluster, select_m
from xiboot.simulation import Gaussian, PoissonMixture, StudentT, StudyConfig, calibrate_truth, generate_sample, run_study

pytestmark = pytest.mark.acceptance

CELLS = {
    "gaussian-0": Gaussian(0.0),
    "gaussian-0.5": Gaussian(0.5),
    "gaussian-0.9": Gaussian(0.9),
    "poisson-0": PoissonMixture(2.0, 0.0),
    "poisson-0.9": PoissonMixture(2.0, 0.9),
    "t3-0.5": StudentT(3.0, 0.5),
}


@pytest.fixture(scope="session")
def truths():
    return {name: calibrate_truth(model, 20000, 5000, seed=1000 + k) for k, (name, model) in enumerate(CELLS.items())}


def test_criterion_1_independence_limit():
    t0 = time.perf_counter()
    est = []
    for k in range(20):
        s = generate_sample(Gaussian(0.0), 10_000, derive_rng(1, k))
        trace = select_m(s, Cluster(), B=2000, seed=100 + k)
        est.append(bootstrap_variance(trace.chosen))
    elapsed = time.perf_counter() - t0
    mean = float(np.mean(est))
    ok = 0.35 <= mean <= 0.45 and elapsed < 120
    record_acceptance(1, "independence limit", ok, f"mean sigma*^2={mean:.4f} in [0.35, 0.45], {elapsed:.1f}s < 120s")
    assert ok


def test_criterion_2_reference_calibration(truths):
    targets = [
        ("gaussian-0", "sigma_sq_hat", 0.40, 0.04),
        ("gaussian-0.5", "sigma_sq_hat", 0.51, 0.04),
        ("poisson-0", "sigma_sq_hat", 0.46, 0.04),
        ("poisson-0.9", "sigma_sq_hat", 0.20, 0.04),
        ("t3-0.5", "sigma_sq_hat", 0.58, 0.04),
        ("gaussian-0.9", "xi_hat", 0.58, 0.02),
    ]
    parts, ok = [], True
    for cell, attr, target, tol in targets:
        got = getattr(truths[cell], attr)
        ok &= abs(got - target) <= tol
        parts.append(f"{cell} {attr}={got:.4f} (target {target}±{tol})")
    record_acceptance(2, "reference calibration values", ok, "; ".join(parts))
    assert ok


def test_criterion_3_coverage(truths):
    cases = [
        ("gaussian-0", 500, 0.95, None),
        ("gaussian-0.5", 500, 0.93, None),
        ("poisson-0", 1000, 0.95, 0.04),
    ]
    parts, ok = [], True
    for k, (cell, n, nominal, tol) in enumerate(cases):
        cfg = StudyConfig(CELLS[cell], n=n, M=200, B=500, rule=Cluster(), seed=300 + k)
        rep = run_study(cfg, truths[cell])
        band = tol if tol is not None else 3 * math.sqrt(nominal * (1 - nominal) / len(rep.records))
        hit = abs(rep.coverage - nominal) <= band and rep.n_failed == 0
        ok &= hit
        parts.append(f"{cell} n={n}: {rep.coverage:.3f} vs {nominal}±{band:.3f}")
    record_acceptance(3, "coverage at desk scale", ok, "; ".join(parts))
    assert ok


def test_criterion_4_rrmse_improves(truths):
    truth = truths["gaussian-0.5"]
    rr = {}
    for n in (100, 1000):
        cfg = StudyConfig(Gaussian(0.5), n=n, M=200, B=500, rule=Cluster(), seed=400)
        rr[n] = run_study(cfg, truth).rrmse
    ok = rr[1000] < rr[100]
    record_acceptance(4, "rRMSE decreases with n", ok, f"rRMSE(100)={rr[100]:.4f}, rRMSE(1000)={rr[1000]:.4f}")
    assert ok


def test_criterion_5_exact_oracles():
    checked = {"center": 0, "kolmogorov": 0, "wasserstein": 0}

    @given(st.integers(4, 8), st.integers(2, 4), st.integers(0, 2**32 - 1), st.sampled_from(["distinct", "y-ties", "x-ties"]))
    @settings(max_examples=12, deadline=None, derandomize=True)
    def center(n, m, seed, kind):
        if m >= n:
            return
        g = np.random.default_rng(seed)
        xs = g.integers(0, 3, n).astype(float) if kind == "x-ties" else g.permutation(n).astype(float)
        ys = g.integers(0, 3, n).astype(float) if kind == "y-ties" else g.standard_normal(n)
        if np.all(ys == ys[0]):
            return
        exact = exact_subset_center(xs.tolist(), ys.tolist(), m)
        values, _ = subsample_xis(PairedSample(xs, ys), BootstrapConfig(m=m, B=100_000, seed=seed))
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - exact) <= 3 * se + 1e-12
        checked["center"] += 1

    atoms = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=40)

    @given(atoms, atoms)
    @settings(max_examples=1000, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
    def kolmogorov(a, b):
        assert kolmogorov_distance(a, b) == brute_kolmogorov(a, b)
        checked["kolmogorov"] += 1

    small = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=5)

    @given(small, small, st.sampled_from([1.0, 2.0, 3.0]))
    @settings(max_examples=300, deadline=None, derandomize=True)
    def wasserstein(a, b, p):
        assert abs(wasserstein_p(a, b, p) - brute_wasserstein(a, b, p)) <= 1e-10
        checked["wasserstein"] += 1

    ok, err = True, ""
    for fn in (center, kolmogorov, wasserstein):
        try:
            fn()
        except AssertionError as exc:
            ok, err = False, f" first failure in {fn.__name__}: {str(exc).splitlines()[0]}"
            break
    record_acceptance(5, "exact-oracle equivalence", ok, f"cases checked {checked}{err}")
    assert ok


def test_criterion_6_formula_identities():
    g = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        n = int(g.integers(2, 400))
        p = compute_ranks(PairedSample(g.standard_normal(n), g.permutation(n).astype(float)))
        worst = max(worst, abs(xi_with_ties(p) - xi_no_ties(p)))
    mono = all(xi(PairedSample(np.arange(n, dtype=float), np.arange(n) ** 3.0)) == 1 - 3 / (n + 1) for n in range(2, 600))
    invariant = True
    for k in range(200):
        h = np.random.default_rng(k)
        n = int(h.integers(3, 300))
        xs, ys = h.standard_normal(n), h.integers(0, 6, n).astype(float)
        if np.all(ys == ys[0]):
            continue
        invariant &= xi(PairedSample(xs, ys), k) == xi(PairedSample(np.arctan(xs) * 7 + 1, np.exp(ys)), k)
    ok = worst <= 1e-12 and mono and invariant
    record_acceptance(6, "formula identities", ok, f"max |tie - no-tie|={worst:.1e}, monotone exact={mono}, transform invariant={invariant}")
    assert ok


def _cli(argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, re.sub(r'"timestamp": "[^"]*"', '"timestamp": ""', buf.getvalue())


def test_criterion_7_determinism(tmp_path):
    s = generate_sample(PoissonMixture(2.0, 0.5), 400, 7)
    data = tmp_path / "data.csv"
    data.write_text("x,y\n" + "".join(f"{x:.17g},{y:.17g}\n" for x, y in zip(s.xs, s.ys)))
    truth = tmp_path / "truth.json"
    assert _cli(["calibrate", "--model", "poisson", "--rho", 0.5, "--n-cal", 400, "--M-cal", 40, "--out", truth])[0] == 0
    commands = {
        "xi": ["xi", data],
        "bootstrap": ["bootstrap", data, "--B", 500],
        "bootstrap-bs": ["bootstrap", data, "--rule", "bickel-sakov", "--B", 500],
        "calibrate": ["calibrate", "--model", "t", "--rho", 0.3, "--n-cal", 500, "--M-cal", 50],
        "study": ["study", "--model", "poisson", "--rho", 0.5, "--n", 150, "--M", 5, "--B", 200, "--truth", truth],
    }
    same = {}
    for name, argv in commands.items():
        outputs = []
        for t in (1, 4, 8):
            extra = ["--out", tmp_path / f"{name}-{t}"] if name == "study" else []
            code, text = _cli([*argv, "--threads", t, *extra])
            if name == "study":
                csv_text = (tmp_path / f"{name}-{t}" / "records.csv").read_text()
                text += re.sub(r'"timestamp": "[^"]*"', "", csv_text)
            outputs.append((code, text.encode()))
        same[name] = outputs[0][0] == 0 and outputs[0] == outputs[1] == outputs[2]
    ok = all(same.values())
    record_acceptance(7, "determinism across threads 1/4/8", ok, str(same))
    assert ok


def test_criterion_8_complexity():
    B = 20_000
    sizes = (10_000, 20_000, 40_000)
    samples = [generate_sample(Gaussian(0.5), n, 8) for n in sizes]
    times = [[] for _ in sizes]
    gc.disable()
    try:
        for s in samples:
            bootstrap_distribution(s, BootstrapConfig(m=math.isqrt(s.n), B=B, seed=0), threads=1)
        # interleave repetitions so transient load hits every n alike
        for r in range(5):
            for i, s in enumerate(samples):
                t0 = time.perf_counter()
                bootstrap_distribution(s, BootstrapConfig(m=math.isqrt(s.n), B=B, seed=r + 1), threads=1)
                times[i].append(time.perf_counter() - t0)
    finally:
        gc.enable()
    medians = [statistics.median(t) for t in times]
    ratios = [medians[i + 1] / medians[i] for i in range(2)]
    ok = max(ratios) <= 1.6
    record_acceptance(8, "complexity smoke test", ok, f"median times {[round(t, 3) for t in medians]}s, ratios {[round(r, 3) for r in ratios]} <= 1.6")
    assert ok
