"""Distance distributions within and between unit trapezoids."""
from .dist import (
    ContinuityConstants,
    ContinuityError,
    PiecewiseFn,
    ScaledDistribution,
    cdf,
    mean_distance,
    pdf,
    scaled_cdf,
    scaled_pdf,
    solve_continuity_constants,
    support,
)
from .geom import (
    Arrangement,
    Case,
    Point2,
    Trapezoid,
    canonical_trapezoid,
    make_arrangement,
    make_rng,
    sample_pair,
    sample_point,
)

__version__ = "0.1.0"
