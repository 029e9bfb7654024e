"""Empirical-distribution utilities for the verification layer.

Small, dependency-light helpers: sorted-sample ECDFs, two-sample
Kolmogorov-Smirnov distance, the DKW confidence band, log-log tail-exponent
fits, and a variance-vs-size scaling fit.  All of them validate their
inputs loudly — a silent NaN in a verification pipeline is worse than an
exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import DegenerateSampleError

__all__ = [
    "EmpiricalDistribution",
    "ExponentFit",
    "dkw_band",
    "ks_distance",
    "tail_exponent_fit",
    "variance_scaling",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted finite sample with ECDF and quantile accessors."""

    samples: np.ndarray

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDistribution":
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("empty sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample contains non-finite values; filter them first")
        return cls(samples=np.sort(arr))

    @property
    def n(self) -> int:
        return len(self.samples)

    def ecdf_at(self, u):
        """Right-continuous ECDF ``P(X <= u)``, vectorized."""
        pos = np.searchsorted(self.samples, np.asarray(u, dtype=float), side="right")
        out = pos / self.n
        return out if out.ndim else float(out)

    def quantile(self, p):
        """Lower empirical quantile: smallest sample with ECDF >= p."""
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr < 0.0) | (p_arr > 1.0)):
            raise ValueError("quantile level must lie in [0, 1]")
        idx = np.clip(np.ceil(p_arr * self.n).astype(int) - 1, 0, self.n - 1)
        out = self.samples[idx]
        return out if np.ndim(p) else float(out)

    @property
    def min(self) -> float:
        return float(self.samples[0])

    @property
    def max(self) -> float:
        return float(self.samples[-1])


def dkw_band(n: int, delta: float = 0.05) -> float:
    """Half-width ``sqrt(ln(2/delta) / (2n))`` of the DKW confidence band.

    With probability at least ``1 - delta`` the ECDF of an i.i.d. sample of
    size ``n`` stays within this sup-norm distance of the true CDF.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def _as_ecdf(obj) -> EmpiricalDistribution:
    if isinstance(obj, EmpiricalDistribution):
        return obj
    return EmpiricalDistribution.from_samples(obj)


def ks_distance(a, b) -> float:
    """Exact two-sample sup-distance between ECDFs.

    Accepts raw samples or :class:`EmpiricalDistribution` objects.  The
    supremum of the difference of two right-continuous step functions is
    attained at a jump point, so evaluating both ECDFs on the pooled
    sample is exact.
    """
    ea = _as_ecdf(a)
    eb = _as_ecdf(b)
    grid = np.concatenate([ea.samples, eb.samples])
    return float(np.max(np.abs(ea.ecdf_at(grid) - eb.ecdf_at(grid))))


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ``ln y = slope * ln x + intercept``."""

    slope: float
    intercept: float
    stderr: float
    r_squared: float
    n_points: int


def tail_exponent_fit(x, y) -> ExponentFit:
    """Fit a power law ``y ~ exp(intercept) * x**slope`` by log-log OLS.

    Requires at least 3 strictly positive, finite points.  ``stderr`` is
    the standard error of the slope; rescaling ``y`` by a constant changes
    only the intercept.
    """
    x_arr = np.asarray(x, dtype=float).ravel()
    y_arr = np.asarray(y, dtype=float).ravel()
    if x_arr.shape != y_arr.shape:
        raise ValueError("x and y must have the same length")
    if x_arr.size < 3:
        raise ValueError("need at least 3 points for a slope with an error bar")
    if not (np.all(np.isfinite(x_arr)) and np.all(np.isfinite(y_arr))):
        raise ValueError("non-finite input")
    if np.any(x_arr <= 0.0) or np.any(y_arr <= 0.0):
        raise ValueError("power-law fit needs strictly positive data")
    lx = np.log(x_arr)
    ly = np.log(y_arr)
    n = len(lx)
    mx = lx.mean()
    my = ly.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    if sxx == 0.0:
        raise ValueError("x values are all equal")
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = my - slope * mx
    resid = ly - (slope * lx + intercept)
    ssr = float(np.sum(resid**2))
    sst = float(np.sum((ly - my) ** 2))
    dof = n - 2
    stderr = math.sqrt(ssr / dof / sxx) if dof > 0 else math.inf
    r_squared = 1.0 - ssr / sst if sst > 0 else 1.0
    return ExponentFit(
        slope=slope,
        intercept=float(intercept),
        stderr=float(stderr),
        r_squared=float(r_squared),
        n_points=n,
    )


def variance_scaling(sizes, samples_by_size) -> ExponentFit:
    """Fit the growth exponent of sample variance against size.

    ``samples_by_size[j]`` is a sample of the observable at scale
    ``sizes[j]``; the result is the log-log fit of variance versus size.
    Raises :class:`axiswalk.analytics.DegenerateSampleError` if any scale
    has zero variance, which would silently break the log fit.
    """
    sizes_arr = np.asarray(sizes, dtype=float).ravel()
    if len(sizes_arr) != len(samples_by_size):
        raise ValueError("sizes and samples_by_size lengths differ")
    variances = []
    for j, sample in enumerate(samples_by_size):
        arr = np.asarray(sample, dtype=float).ravel()
        if arr.size < 2:
            raise ValueError(f"scale {sizes_arr[j]:g} has fewer than 2 observations")
        v = float(np.var(arr, ddof=1))
        if v == 0.0:
            raise DegenerateSampleError(
                f"zero variance at scale {sizes_arr[j]:g}; observable is degenerate"
            )
        variances.append(v)
    return tail_exponent_fit(sizes_arr, variances)
