"""
Compression Constant Estimator
------------------------------
Monte-Carlo diagnostics for the compression contract

    E||C(x) - x||^2     <= C ||x||^2 + sigma^2
    E||C(x)/r - x||^2   <= (1 - delta) ||x||^2 + sigma_r^2

Inputs are drawn as x = input_scale * t * g with t ~ U(0, 1), g ~ N(0, I),
plus the zero vector, and every point is compressed ``REPEATS`` times.
Each (slope, intercept) pair is the least-area upper line over the sample
cloud: the line lying on or above every point that minimises its mean
height over the sampled ||x||^2, with slope >= 0. These are estimates with
standard errors, not certified bounds.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np

from compressors.operators import build_compressor
from compressors.specs import parse_spec

logger = logging.getLogger(__name__)

REPEATS = 8
MIN_SAMPLES = 1000
DELTA_FLOOR = 1e-12


@dataclass(frozen=True)
class CompressionConstants:
    C_hat: float
    sigma2_hat: float
    r: float
    delta_hat: float
    sigma2_r_hat: float
    sample_count: int
    dim: int
    C_stderr: float
    sigma2_stderr: float
    delta_stderr: float
    sigma2_r_stderr: float

    def to_dict(self) -> dict:
        return asdict(self)


def _upper_hull(s: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull, left to right (monotone chain)."""
    order = np.lexsort((-e, s))
    hull: list[int] = []
    for i in order:
        if hull and s[hull[-1]] == s[i]:
            continue
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (s[a] - s[o]) * (e[i] - e[o]) - (e[a] - e[o]) * (s[i] - s[o])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(int(i))
    return np.asarray(hull, dtype=np.int64)


def fit_upper_line(s: np.ndarray, e: np.ndarray, se: np.ndarray) -> tuple[float, float, float, float]:
    """Least-area upper line e <= c s + b with c >= 0.

    Returns (c, b, stderr_c, stderr_b); the standard errors are propagated
    from the points the chosen line passes through.
    """
    hull = _upper_hull(s, e)
    slopes = np.diff(e[hull]) / np.diff(s[hull]) if hull.size > 1 else np.zeros(0)
    candidates = np.unique(np.concatenate([[0.0], slopes[slopes > 0]]))
    intercepts = np.max(e[None, :] - candidates[:, None] * s[None, :], axis=1)
    area = candidates * s.mean() + intercepts
    best = int(np.argmin(area))
    c, b = float(candidates[best]), float(intercepts[best])

    gap = b - (e - c * s)
    binding = np.flatnonzero(gap <= 1e-12 * max(1.0, abs(b)))
    lo, hi = int(binding[np.argmin(s[binding])]), int(binding[np.argmax(s[binding])])
    if c > 0 and s[hi] > s[lo]:
        se_c = float(np.hypot(se[lo], se[hi]) / (s[hi] - s[lo]))
    else:
        se_c = 0.0
    se_b = float(np.hypot(se[lo], s[lo] * se_c))
    return c, b, se_c, se_b


def estimate_constants(
    spec,
    dim: int,
    r: float,
    samples: int,
    input_scale: float,
    rng: np.random.Generator,
) -> CompressionConstants:
    """Estimate (C, sigma^2) and (delta, sigma_r^2) for ``spec`` at dimension ``dim``."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"At least {MIN_SAMPLES} samples are required, got {samples}")
    if dim < 1 or r <= 0 or input_scale <= 0:
        raise ValueError("dim, r and input_scale must be positive")

    compressor = build_compressor(parse_spec(spec))
    n_points = samples // REPEATS
    points = np.zeros((n_points + 1, dim))
    points[1:] = input_scale * rng.random(n_points)[:, None] * rng.standard_normal((n_points, dim))

    err = np.empty((n_points + 1, REPEATS))
    err_r = np.empty((n_points + 1, REPEATS))
    for i, x in enumerate(points):
        for j in range(REPEATS):
            cx = compressor.roundtrip(x, rng)
            err[i, j] = np.sum((cx - x) ** 2)
            err_r[i, j] = np.sum((cx / r - x) ** 2)

    s = np.sum(points ** 2, axis=1)
    se = err.std(axis=1, ddof=1) / np.sqrt(REPEATS)
    se_r = err_r.std(axis=1, ddof=1) / np.sqrt(REPEATS)
    C_hat, sigma2_hat, C_se, sigma2_se = fit_upper_line(s, err.mean(axis=1), se)
    c_r, sigma2_r_hat, c_r_se, sigma2_r_se = fit_upper_line(s, err_r.mean(axis=1), se_r)

    delta_hat = 1.0 - c_r
    if delta_hat < DELTA_FLOOR:
        logger.warning(f"Estimated delta {delta_hat:.3e} is not positive; clipped to {DELTA_FLOOR:.0e}")
        delta_hat = DELTA_FLOOR

    constants = CompressionConstants(
        C_hat=C_hat,
        sigma2_hat=sigma2_hat,
        r=float(r),
        delta_hat=float(min(delta_hat, 1.0)),
        sigma2_r_hat=sigma2_r_hat,
        sample_count=int(err.size),
        dim=int(dim),
        C_stderr=C_se,
        sigma2_stderr=sigma2_se,
        delta_stderr=c_r_se,
        sigma2_r_stderr=sigma2_r_se,
    )
    logger.info(
        f"Estimated constants for {compressor.spec.label()}: C={C_hat:.4g}, sigma2={sigma2_hat:.4g}, "
        f"delta={constants.delta_hat:.4g}, sigma2_r={sigma2_r_hat:.4g} ({constants.sample_count} samples)"
    )
    return constants
