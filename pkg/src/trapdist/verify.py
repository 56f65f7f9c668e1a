"""Monte Carlo verification of the closed forms and numerical consistency checks."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from . import dist
from .geom import D_MAX, Case, make_arrangement, make_rng, sample_distances

KS_COEFF = 1.36  # asymptotic two-sided KS critical coefficient at alpha = 0.05
CHUNK = 1_000_000

# consistency tolerances
NORM_TOL = 1e-9
ENDPOINT_TOL = 1e-10
CONTINUITY_TOL = 1e-9
NONNEG_TOL = 1e-12
# CDF branches cancel terms of size ~10, so rounding noise is ~1e-15
MONOTONE_TOL = 1e-13
FD_STEP = 1e-6
FD_MARGIN = 1e-3
GRID = 100_000
FD_POINTS = 1000

REPORT_HEADER = ("case", "check", "n", "seed", "statistic", "threshold", "location", "pass")


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_distances: np.ndarray
    n: int

    def __post_init__(self):
        if self.n < 1 or len(self.sorted_distances) != self.n:
            raise ValueError("empirical CDF needs n >= 1 samples")

    @classmethod
    def from_samples(cls, samples: Iterable[float]) -> "EmpiricalCdf":
        x = np.sort(np.asarray(list(samples), dtype=float))
        return cls(x, len(x))

    def __call__(self, x):
        return np.searchsorted(self.sorted_distances, x, side="right") / self.n


@dataclass(frozen=True)
class Check:
    """One row of the verification report."""

    case: Case
    check: str
    statistic: float
    threshold: float
    passed: bool
    location: float | None = None
    n: int | None = None
    seed: int | None = None

    def row(self) -> list[str]:
        return [
            self.case.value.lower(),
            self.check,
            "" if self.n is None else str(self.n),
            "" if self.seed is None else str(self.seed),
            fmt(self.statistic),
            fmt(self.threshold),
            "" if self.location is None else fmt(self.location),
            "true" if self.passed else "false",
        ]


@dataclass(frozen=True)
class KsReport:
    case_id: Case
    n: int
    seed: int
    ks_statistic: float
    critical_value: float
    location: float
    consistency_pass: bool = True

    @property
    def passed(self) -> bool:
        return self.ks_statistic < self.critical_value

    def as_check(self) -> Check:
        return Check(
            self.case_id, "ks", self.ks_statistic, self.critical_value,
            self.passed, self.location, self.n, self.seed,
        )


def fmt(x: float) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def simulate_distances(case_id: Case | str, n: int, seed: int) -> EmpiricalCdf:
    if n < 1:
        raise ValueError("n must be >= 1")
    arr = make_arrangement(case_id)
    rng = make_rng(seed)
    parts = [sample_distances(arr, rng, min(CHUNK, n - i)) for i in range(0, n, CHUNK)]
    return EmpiricalCdf(np.sort(np.concatenate(parts)), n)


def ks_test(emp: EmpiricalCdf, case_id: Case | str) -> tuple[float, float]:
    """KS statistic against the closed-form CDF and the distance where it occurs."""
    x = emp.sorted_distances
    F = np.asarray(dist.cdf(case_id, x))
    i = np.arange(1, emp.n + 1)
    gap = np.maximum(np.abs(i / emp.n - F), np.abs((i - 1) / emp.n - F))
    k = int(np.argmax(gap))
    return float(gap[k]), float(x[k])


def ks_statistic(emp: EmpiricalCdf, case_id: Case | str) -> float:
    return ks_test(emp, case_id)[0]


def critical_value(n: int) -> float:
    return KS_COEFF / math.sqrt(n)


def quantile(case_id: Case | str, p: float) -> float:
    """Numerical inverse of the CDF by bracketing root search."""
    lo, hi = dist.support(case_id)
    if p <= 0:
        return lo
    if p >= 1:
        return hi
    return optimize.brentq(lambda d: dist.cdf(case_id, d) - p, lo, hi, xtol=1e-14, rtol=1e-15)


def _interior_grid(bps: Sequence[float], n: int, margin: float) -> np.ndarray:
    """``n`` evenly spread points avoiding ``margin``-neighborhoods of breakpoints."""
    lo = np.array(bps[:-1]) + margin
    hi = np.array(bps[1:]) - margin
    lengths = np.maximum(hi - lo, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    u = np.linspace(0.0, cum[-1], n + 2)[1:-1]
    j = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(lengths) - 1)
    return lo[j] + (u - cum[j])


def consistency_suite(case_id: Case | str) -> list[Check]:
    """Numerical self-consistency of the PDF/CDF pair of one case."""
    case = Case.parse(case_id)
    f, F = dist.pdf_fn(case), dist.cdf_fn(case)
    bps = dist.breakpoints(case)
    d_max = D_MAX[case]
    checks = []

    mass = dist.integrate_piecewise(f, bps)
    checks.append(Check(case, "normalization", abs(mass - 1.0), NORM_TOL, abs(mass - 1.0) < NORM_TOL))

    end = abs(F.branch(len(F.branches) - 1, d_max) - 1.0)
    checks.append(Check(case, "cdf_endpoint", end, ENDPOINT_TOL, end < ENDPOINT_TOL, d_max))

    for name, fn in (("pdf_continuity", f), ("cdf_continuity", F)):
        jumps = [abs(fn.branch(i - 1, b) - fn.branch(i, b)) for i, b in enumerate(bps[1:-1], 1)]
        k = int(np.argmax(jumps))
        checks.append(Check(case, name, jumps[k], CONTINUITY_TOL, jumps[k] < CONTINUITY_TOL, bps[k + 1]))

    x = _interior_grid(bps, FD_POINTS, FD_MARGIN)
    fd = (F(x + FD_STEP) - F(x - FD_STEP)) / (2 * FD_STEP)
    ref = f(x)
    ratio = np.abs(fd - ref) / np.maximum(1e-6, 1e-4 * np.abs(ref))
    k = int(np.argmax(ratio))
    checks.append(Check(case, "finite_difference", ratio[k], 1.0, ratio[k] <= 1.0, x[k]))

    grid = np.linspace(0.0, d_max, GRID)
    vals = dataclasses.replace(f, clip=None)(grid)
    k = int(np.argmin(vals))
    checks.append(Check(case, "nonnegativity", -vals[k], NONNEG_TOL, vals[k] >= -NONNEG_TOL, grid[k]))

    steps = np.diff(F(grid))
    k = int(np.argmin(steps))
    checks.append(Check(case, "monotonicity", -steps[k], MONOTONE_TOL, steps[k] >= -MONOTONE_TOL, grid[k]))

    outside = max(
        abs(F(-1.0)), abs(F(d_max + 1.0) - 1.0), abs(f(-1.0)), abs(f(d_max + 1.0))
    )
    checks.append(Check(case, "outside_support", outside, 0.0, outside == 0.0))
    return checks


def run_verification(
    case_id: Case | str, n: int, seeds: Sequence[int]
) -> list[KsReport]:
    """KS test against ``n`` simulated pairs for each seed, sorted by seed.

    Every report also records whether the case passed :func:`consistency_suite`.
    """
    if n < 100:
        raise ValueError("n must be >= 100")
    if not seeds:
        raise ValueError("at least one seed is required")
    case = Case.parse(case_id)
    consistent = all(c.passed for c in consistency_suite(case))
    reports = []
    for seed in sorted(seeds):
        stat, loc = ks_test(simulate_distances(case, n, seed), case)
        reports.append(KsReport(case, n, seed, stat, critical_value(n), loc, consistent))
    return reports
