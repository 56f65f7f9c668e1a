"""Least-squares polynomial approximations of the distance densities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import dist
from .geom import D_MAX, Case

DEFAULT_DEGREE = 12
DEFAULT_GRID = 1000


@dataclass(frozen=True)
class FitConfig:
    degree: int = DEFAULT_DEGREE
    grid_points: int = DEFAULT_GRID

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.grid_points <= self.degree + 1:
            raise ValueError(
                f"grid_points ({self.grid_points}) must exceed degree + 1 ({self.degree + 1})"
            )

    def grid(self, case_id: Case | str) -> np.ndarray:
        return np.linspace(0.0, D_MAX[Case.parse(case_id)], self.grid_points)


@dataclass(frozen=True)
class FitResult:
    case_id: Case
    coefficients: tuple[float, ...]  # highest degree first
    norm_residuals: float

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, d):
        return eval_poly(self.coefficients, d)


def eval_poly(coefficients, d):
    """Horner evaluation; ``coefficients`` are ordered highest degree first."""
    if len(coefficients) == 0:
        raise ValueError("empty coefficient list")
    x = np.asarray(d, dtype=float)
    acc = np.zeros_like(x)
    for c in coefficients:
        acc = acc * x + c
    return float(acc) if acc.ndim == 0 else acc


def lstsq_poly(x: np.ndarray, y: np.ndarray, degree: int) -> np.ndarray:
    """Monomial least-squares coefficients (highest first) via Householder QR.

    The abscissae are rescaled to [-1, 1]-ish magnitude before building the
    Vandermonde matrix; the scale is folded back into the coefficients.
    """
    x = np.asarray(x, dtype=float)
    if len(x) <= degree:
        raise ValueError("need more samples than the polynomial degree")
    scale = float(np.max(np.abs(x))) or 1.0
    V = np.vander(x / scale, degree + 1)
    Q, R = np.linalg.qr(V, mode="reduced")
    a = linalg.solve_triangular(R, Q.T @ np.asarray(y, dtype=float))
    powers = np.arange(degree, -1, -1)
    return a / scale**powers


def fit_pdf(case_id: Case | str, cfg: FitConfig | None = None) -> FitResult:
    cfg = cfg or FitConfig()
    case = Case.parse(case_id)
    x = cfg.grid(case)
    y = dist.pdf(case, x)
    coef = lstsq_poly(x, y, cfg.degree)
    resid = float(np.linalg.norm(y - eval_poly(coef, x)))
    return FitResult(case, tuple(float(c) for c in coef), resid)
