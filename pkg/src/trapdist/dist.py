"""Closed-form distance distributions for the four trapezoid arrangements.

Every density is written as ``2 d g(d)`` with a piecewise bracket ``g``; the
CDF branches are the matching antiderivatives without their additive
constants, which are recovered by continuity (see
:func:`solve_continuity_constants`).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .geom import D_MAX, SQRT3, Case

PI = math.pi
R3 = SQRT3

#: CDF continuity constants as printed (4 decimals), keyed by 0-based branch.
PAPER_CONSTANTS: dict[Case, dict[int, float]] = {
    Case.AB: {2: 0.0735, 3: 0.4074},
    Case.CD: {2: 0.0359, 3: 0.7026},
    Case.EF: {2: -0.0561, 3: -0.0561, 4: -0.3528, 5: -1.6677},
    Case.GH: {2: 0.0176, 3: -0.3157},
}


class ContinuityError(ArithmeticError):
    """The CDF branch table does not reach 1 at the end of the support."""


def _asin(x):
    # rounding can push the argument a hair past 1 at a breakpoint
    return np.arcsin(np.clip(x, -1.0, 1.0))


def _ah(d):
    # asin(sqrt3 / (2d)); argument hits 1 at d = sqrt3/2
    return _asin(R3 / (2.0 * d))


def _af(d):
    # asin(sqrt3 / d); argument hits 1 at d = sqrt3
    return _asin(R3 / d)


def _rh(d):
    return np.sqrt(np.maximum(4.0 * d * d - 3.0, 0.0))


def _rf(d):
    return np.sqrt(np.maximum(d * d - 3.0, 0.0))


_B1 = R3 / 2
_B2 = 1.0
_B3 = R3
_S7 = math.sqrt(7.0)

Branch = Callable[[np.ndarray], np.ndarray]

# Brackets g(d) of the densities f(d) = 2 d g(d).
_PDF_BRACKETS: dict[Case, tuple[tuple[float, ...], tuple[Branch, ...]]] = {
    Case.AB: (
        (0.0, _B1, _B2, _B3, 2.0),
        (
            lambda d: 8 / 9 * (PI / (9 * R3) + 2 / 3) * d**2 - 80 / 27 * d + 4 * PI / (3 * R3),
            lambda d: 8 / 3 * (2 / (9 * R3) * d**2 + 1 / R3) * _ah(d)
            + 16 / 9 * (1 / 3 - PI / (9 * R3)) * d**2
            + 28 / 27 * _rh(d)
            - 80 / 27 * d,
            lambda d: 16 / 9 * (-1 / (3 * R3) * d**2 + 1 / R3) * _ah(d)
            + 16 * PI / (81 * R3) * d**2
            - 4 / 27 * d**2
            + 4 / 9 * _rh(d)
            - 32 / 27 * d
            + 8 * PI / (27 * R3)
            - 4 / 9,
            lambda d: 16 / (9 * R3) * (d**2 / 3 + 2) * _af(d)
            + 4 / 9 * (1 / 3 - 4 * PI / (9 * R3)) * d**2
            + 16 / 9 * _rf(d)
            - 32 / 27 * d
            - 32 * PI / (27 * R3),
        ),
    ),
    Case.CD: (
        (0.0, _B1, _B2, _B3, 2.0),
        (
            lambda d: -4 / 27 * (1 + 5 * PI / (3 * R3)) * d**2 + 32 / 27 * d,
            lambda d: -1 / (3 * R3) * (16 / 9 * d**2 + 8) * _ah(d)
            + 4 / 27 * (PI / (3 * R3) - 1) * d**2
            - 28 / 27 * _rh(d)
            + 32 / 27 * d
            + 4 * PI / (3 * R3),
            lambda d: -4 / (9 * R3) * (8 / 3 * d**2 + 10) * _ah(d)
            + 4 / 27 * (5 * PI / (3 * R3) + 1) * d**2
            - 16 / 9 * _rh(d)
            + 32 / 27 * d
            + 52 * PI / (27 * R3)
            + 4 / 9,
            lambda d: 8 / (9 * R3) * (d**2 / 3 + 8) * _af(d)
            - 8 / 27 * (PI / (3 * R3) + 2) * d**2
            + 8 / 3 * _rf(d)
            + 32 / 27 * d
            - 64 * PI / (27 * R3)
            - 8 / 3,
        ),
    ),
    Case.EF: (
        (0.0, _B1, _B2, _B3, 2.0, _S7, 2 * R3),
        (
            lambda d: -4 / 27 * (2 * PI / (3 * R3) + 1) * d**2 + 16 / 27 * d,
            lambda d: -8 / (9 * R3) * (2 / 3 * d**2 + 1) * _ah(d)
            + 4 / 27 * (4 * PI / (3 * R3) - 1) * d**2
            + 16 / 27 * d
            + 4 * PI / (9 * R3)
            - 4 / 9 * _rh(d),
            lambda d: 8 / (9 * R3) * (d**2 / 3 + 1) * _ah(d)
            - 4 / 27 * (2 * PI / (3 * R3) + 1) * d**2
            + 10 / 27 * _rh(d)
            - 4 * PI / (27 * R3)
            - 2 / 9,
            lambda d: 8 / (9 * R3) * (d**2 / 3 - 2) * _ah(d)
            - 8 / (9 * R3) * (d**2 / 3 + 2) * _af(d)
            + 4 / 27 * (PI / (3 * R3) + 2) * d**2
            - 8 / 9 * _rf(d)
            - 14 / 27 * _rh(d)
            + 32 * PI / (27 * R3)
            + 10 / 9,
            lambda d: 8 / (9 * R3) * (d**2 / 3 - 2) * _ah(d)
            + 16 / (9 * R3) * _af(d)
            - 4 / 27 * (PI / (3 * R3) - 1) * d**2
            - 14 / 27 * _rh(d)
            + 16 / 27 * _rf(d)
            + 2 / 9,
            lambda d: 8 / (9 * R3) * (-(d**2) / 3 + 4) * _af(d)
            + 4 / 27 * (PI / (3 * R3) - 1) * d**2
            + 8 / 9 * _rf(d)
            - 16 * PI / (27 * R3)
            - 8 / 9,
        ),
    ),
    Case.GH: (
        (0.0, _B1, _B2, _B3, _S7),
        (
            lambda d: 4 / 27 * (PI / (3 * R3) - 1) * d**2 + 16 / 27 * d,
            lambda d: 8 / (9 * R3) * (2 / 3 * d**2 - 1) * _ah(d)
            - 4 / 27 * (5 * PI / (3 * R3) + 1) * d**2
            - 4 / 27 * _rh(d)
            + 16 / 27 * d
            + 4 * PI / (9 * R3),
            lambda d: 8 / (3 * R3) * (d**2 / 9 - 1) * _ah(d)
            - 4 / 9 * (PI / (3 * R3) - 1) * d**2
            - 22 / 27 * _rh(d)
            + 28 * PI / (27 * R3)
            + 2 / 3,
            lambda d: -8 / (9 * R3) * (d**2 / 3 - 2) * _ah(d)
            - 8 / (9 * R3) * (d**2 / 3 - 2) * _af(d)
            + 8 / 27 * (PI / (3 * R3) - 1) * d**2
            + 14 / 27 * _rh(d)
            + 8 / 27 * _rf(d)
            - 16 * PI / (27 * R3)
            - 10 / 9,
        ),
    ),
}

# CDF branches without their additive constants.
_CDF_PARTS: dict[Case, tuple[Branch, ...]] = {
    Case.AB: (
        lambda d: 4 / 9 * (2 / 3 + PI / (9 * R3)) * d**4 - 160 / 81 * d**3 + 4 * PI / (3 * R3) * d**2,
        lambda d: 8 / (27 * R3) * (d**2 + 9) * d**2 * _ah(d)
        + 8 / 9 * (1 / 3 - PI / (9 * R3)) * d**4
        - 160 / 81 * d**3
        + (58 * d**2 + 15) / 81 * _rh(d),
        lambda d: -8 / (27 * R3) * (d**2 - 6) * d**2 * _ah(d)
        + (8 * PI / (81 * R3) - 2 / 27) * d**4
        - 64 / 81 * d**3
        + (8 * PI / (27 * R3) - 4 / 9) * d**2
        + (22 * d**2 + 15) / 81 * _rh(d),
        lambda d: 8 / (27 * R3) * (d**2 + 12) * d**2 * _af(d)
        + 2 / 9 * (1 / 3 - 4 * PI / (9 * R3)) * d**4
        - 64 / 81 * d**3
        - 32 * PI / (27 * R3) * d**2
        + (104 * d**2 + 48) / 81 * _rf(d),
    ),
    Case.CD: (
        lambda d: -2 / 27 * (5 * PI / (3 * R3) + 1) * d**4 + 64 / 81 * d**3,
        lambda d: -8 / (27 * R3) * (d**2 + 9) * d**2 * _ah(d)
        + 2 / 27 * (PI / (3 * R3) - 1) * d**4
        + 64 / 81 * d**3
        + 4 * PI / (3 * R3) * d**2
        - (58 * d**2 + 15) / 81 * _rh(d),
        lambda d: -8 / (27 * R3) * (2 * d**2 + 15) * d**2 * _ah(d)
        + 2 / 27 * (5 * PI / (3 * R3) + 1) * d**4
        + 64 / 81 * d**3
        + (52 * PI / (27 * R3) + 4 / 9) * d**2
        - (100 * d**2 + 24) / 81 * _rh(d),
        lambda d: 4 / (27 * R3) * (d**2 + 48) * d**2 * _af(d)
        - 4 / 27 * (PI / (3 * R3) + 2) * d**4
        + 64 / 81 * d**3
        - (64 * PI / (27 * R3) + 8 / 3) * d**2
        + (148 * d**2 + 168) / 81 * _rf(d),
    ),
    Case.EF: (
        lambda d: -2 / 27 * (2 * PI / (3 * R3) + 1) * d**4 + 32 / 81 * d**3,
        lambda d: -8 / (27 * R3) * (d**2 + 3) * d**2 * _ah(d)
        + 2 / 27 * (4 * PI / (3 * R3) - 1) * d**4
        + 32 / 81 * d**3
        + 4 * PI / (9 * R3) * d**2
        - (26 * d**2 + 3) / 81 * _rh(d),
        lambda d: 4 / (27 * R3) * (d**2 + 6) * d**2 * _ah(d)
        - 2 / 27 * (2 * PI / (3 * R3) + 1) * d**4
        - (4 * PI / (27 * R3) + 2 / 9) * d**2
        + (42 * d**2 + 9) / 162 * _rh(d),
        lambda d: 4 / (27 * R3) * d**2 * ((d**2 - 12) * _ah(d) - (d**2 + 12) * _af(d))
        + 2 / 27 * (PI / (3 * R3) + 2) * d**4
        + 2 / 9 * (16 * PI / (3 * R3) + 5) * d**2
        - (54 * d**2 + 27) / 162 * _rh(d)
        - (52 * d**2 + 24) / 81 * _rf(d),
        lambda d: 4 / (27 * R3) * (d**2 - 12) * d**2 * _ah(d)
        + 16 / (9 * R3) * d**2 * _af(d)
        - 2 / 27 * (PI / (3 * R3) - 1) * d**4
        + 2 / 9 * d**2
        - (54 * d**2 + 27) / 162 * _rh(d)
        + (32 * d**2 + 48) / 81 * _rf(d),
        lambda d: -4 / (27 * R3) * (d**2 - 24) * d**2 * _af(d)
        + 2 / 27 * (PI / (3 * R3) - 1) * d**4
        - 8 / 9 * (2 * PI / (3 * R3) + 1) * d**2
        + (44 * d**2 + 120) / 81 * _rf(d),
    ),
    Case.GH: (
        lambda d: 2 / 27 * (PI / (3 * R3) - 1) * d**4 + 32 / 81 * d**3,
        lambda d: 8 / (27 * R3) * (d**2 - 3) * d**2 * _ah(d)
        - 2 / 27 * (5 * PI / (3 * R3) + 1) * d**4
        + 32 / 81 * d**3
        + 4 * PI / (9 * R3) * d**2
        - (2 * d**2 + 3) / 27 * _rh(d),
        lambda d: 4 / (27 * R3) * (d**2 - 18) * d**2 * _ah(d)
        - 2 / 9 * (PI / (3 * R3) - 1) * d**4
        + 2 / 3 * (14 * PI / (9 * R3) + 1) * d**2
        - (86 * d**2 + 39) / 162 * _rh(d),
        lambda d: -4 / (27 * R3) * (d**2 - 12) * d**2 * (_ah(d) + _af(d))
        + 4 / 27 * (PI / (3 * R3) - 1) * d**4
        - 2 / 9 * (8 * PI / (3 * R3) + 5) * d**2
        + (54 * d**2 + 27) / 162 * _rh(d)
        + (12 * d**2 + 72) / 81 * _rf(d),
    ),
}


def _as_output(x: np.ndarray, scalar: bool):
    return float(x[()]) if scalar else x


@dataclass(frozen=True)
class PiecewiseFn:
    """Piecewise function on ``[breakpoints[0], breakpoints[-1]]``.

    Branch ``i`` covers the closed interval ``[breakpoints[i], breakpoints[i+1]]``
    and is shifted by ``offsets[i]``.  Outside the support the function takes
    the constant ``below`` / ``above``; with ``closed_above`` the upper end of
    the support maps to ``above`` as well.  ``clip`` bounds the output.
    """

    breakpoints: tuple[float, ...]
    branches: tuple[Branch, ...]
    offsets: tuple[float, ...] = ()
    below: float = 0.0
    above: float = 0.0
    closed_above: bool = False
    clip: tuple[float, float] | None = None

    def __post_init__(self):
        bp = self.breakpoints
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.branches) != len(bp) - 1:
            raise ValueError("need one branch per interval")
        if not self.offsets:
            object.__setattr__(self, "offsets", (0.0,) * len(self.branches))

    @property
    def support(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    def branch(self, i: int, d):
        """Evaluate branch ``i`` (including its offset) regardless of interval."""
        x = np.asarray(d, dtype=float)
        return _as_output(np.asarray(self.branches[i](x) + self.offsets[i]), x.ndim == 0)

    def __call__(self, d):
        x = np.asarray(d, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        lo, hi = self.support
        out[x < lo] = self.below
        upper = x >= hi if self.closed_above else x > hi
        out[upper] = self.above
        inside = (x >= lo) & ~upper
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.branches) - 1)
        for i, fn in enumerate(self.branches):
            m = inside & (idx == i)
            if m.any():
                out[m] = fn(x[m]) + self.offsets[i]
        if np.isnan(out).any():
            raise FloatingPointError("NaN in piecewise evaluation")
        if self.clip is not None:
            np.clip(out, *self.clip, out=out)
        if scalar:
            return float(out[0])
        return out.reshape(np.shape(d))


@dataclass(frozen=True)
class ContinuityConstants:
    case_id: Case
    constants: dict[int, float] = field(default_factory=dict)
    endpoint_defect: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.constants[i] for i in sorted(self.constants))


def breakpoints(case_id: Case | str) -> tuple[float, ...]:
    return _PDF_BRACKETS[Case.parse(case_id)][0]


def support(case_id: Case | str) -> tuple[float, float]:
    case = Case.parse(case_id)
    return 0.0, D_MAX[case]


@functools.cache
def solve_continuity_constants(case_id: Case | str) -> ContinuityConstants:
    """Additive CDF constants from F(0) = 0 and continuity at each breakpoint.

    Raises :class:`ContinuityError` when the resulting CDF misses 1 at the end
    of the support by more than 1e-6.
    """
    case = Case.parse(case_id)
    bp = breakpoints(case)
    parts = _CDF_PARTS[case]
    consts = [0.0 - float(parts[0](np.float64(0.0)))]
    for i in range(1, len(parts)):
        b = np.float64(bp[i])
        consts.append(consts[-1] + float(parts[i - 1](b)) - float(parts[i](b)))
    defect = float(parts[-1](np.float64(bp[-1]))) + consts[-1] - 1.0
    if abs(defect) > 1e-6:
        raise ContinuityError(f"case {case.value}: F(d_max) - 1 = {defect:.3e}")
    return ContinuityConstants(case, dict(enumerate(consts)), defect)


@functools.cache
def pdf_fn(case_id: Case | str) -> PiecewiseFn:
    case = Case.parse(case_id)
    bp, brackets = _PDF_BRACKETS[case]
    branches = tuple((lambda g: lambda d: 2.0 * d * g(d))(g) for g in brackets)
    return PiecewiseFn(bp, branches, clip=(0.0, math.inf))


@functools.cache
def cdf_fn(case_id: Case | str) -> PiecewiseFn:
    case = Case.parse(case_id)
    consts = solve_continuity_constants(case)
    # F(d_max) = 1 exactly; the closed form only reaches it to rounding
    return PiecewiseFn(
        breakpoints(case), _CDF_PARTS[case], consts.as_tuple(), 0.0, 1.0,
        closed_above=True, clip=(0.0, 1.0),
    )


def pdf(case_id: Case | str, d):
    """Density of the distance for ``case_id``; zero outside the support."""
    return pdf_fn(case_id)(d)


def cdf(case_id: Case | str, d):
    return cdf_fn(case_id)(d)


def _check_scale(s: float) -> None:
    if not s > 0:
        raise ValueError(f"scale must be positive, got {s}")


def scaled_pdf(case_id: Case | str, s: float, d):
    _check_scale(s)
    return (1.0 / s) * pdf(case_id, np.asarray(d, dtype=float) / s)


def scaled_cdf(case_id: Case | str, s: float, d):
    _check_scale(s)
    return cdf(case_id, np.asarray(d, dtype=float) / s)


@dataclass(frozen=True)
class ScaledDistribution:
    """Distance distribution of a trapezoid whose sides are multiplied by ``s``."""

    base: Case
    s: float

    def __post_init__(self):
        object.__setattr__(self, "base", Case.parse(self.base))
        _check_scale(self.s)

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, self.s * D_MAX[self.base]

    def pdf(self, d):
        return scaled_pdf(self.base, self.s, d)

    def cdf(self, d):
        return scaled_cdf(self.base, self.s, d)


def integrate_piecewise(
    fn: Callable[[float], float],
    points: Sequence[float],
    epsabs: float = 1e-13,
    epsrel: float = 1e-13,
) -> float:
    """Adaptive Gauss-Kronrod quadrature, one panel per breakpoint interval."""
    total = 0.0
    for a, b in zip(points, points[1:]):
        val, _ = integrate.quad(fn, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)
        total += val
    return total


def mean_distance(case_id: Case | str) -> float:
    case = Case.parse(case_id)
    f = pdf_fn(case)
    return integrate_piecewise(lambda t: t * f(t), breakpoints(case), epsabs=1e-12)


def paper_constant_deviation(case_id: Case | str) -> dict[int, float]:
    """Recomputed minus printed constant for every printed CDF constant."""
    case = Case.parse(case_id)
    ours = solve_continuity_constants(case).constants
    return {i: ours[i] - v for i, v in PAPER_CONSTANTS[case].items()}
