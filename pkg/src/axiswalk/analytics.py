"""Exact series, recurrences, and limit-law oracles.

Everything here is deterministic mathematics (no walk simulation): survival
products along an axis, the exit-radius moment series built from them, the
growth-rate recurrence and its closed form, the arcsine law, the exact
first-passage law of the lazy height walk, and a sampling oracle for the
limit of rescaled renewal times.  The verification layer compares measured
walk statistics against these references.

Conventions
-----------
``rho_survival(x, alpha, k)`` is the product of the first ``k + 1`` outward
factors ``1 - 1/(2 (x+m)**alpha)``, ``m = 0..k``: the chance that ``k + 1``
consecutive axis moves, starting from distance ``x``, all push outward.
A boundary visit always lasts at least one step, so in terms of the visit
length ``rho`` this product equals ``P(rho > k + 1)`` — note the shift.
The moment series assembles moments of the exit radius ``x - 1 + rho``
with that shift applied, so :func:`rho_mean_exact` is the expectation of
the exit radius the simulator actually produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .models import RngStream

__all__ = [
    "AnalyticsError",
    "ComputationBudgetError",
    "Constants",
    "DegenerateSampleError",
    "DiscreteDistribution",
    "DivergentSeriesError",
    "OracleTailError",
    "RenewalLimitOracle",
    "TailPrediction",
    "arcsine_cdf",
    "closed_form_radius",
    "constants",
    "correction_gain",
    "first_passage_pmf",
    "first_passage_tail_constant",
    "lazy_first_passage",
    "mean_recurrence",
    "renewal_count_reference",
    "renewal_limit_oracle",
    "rho_mean_exact",
    "rho_moment_exact",
    "rho_survival",
    "sample_from",
    "theorem_left_tail",
    "theorem_scaling",
]


class AnalyticsError(Exception):
    """Base class for analytic-layer failures."""


class DivergentSeriesError(AnalyticsError):
    """The requested series provably diverges."""


class ComputationBudgetError(AnalyticsError):
    """The series converges but not within the allowed number of terms."""


class OracleTailError(AnalyticsError):
    """A sampling oracle's truncated tail mass exceeds its certification."""


class DegenerateSampleError(AnalyticsError):
    """A statistic required sample variation that is absent."""


# ---------------------------------------------------------------------------
# closed-form constants


@dataclass(frozen=True)
class Constants:
    """Closed-form constants attached to a drift exponent ``alpha``.

    Growth-related fields are only defined below ``alpha = 1`` (above it
    the walk commits ballistically to an axis and the excursion growth
    scale degenerates); they are ``None`` there.

    Attributes
    ----------
    alpha : float
    regime : str
        ``subcritical`` (< 1/2), ``critical`` (= 1/2), ``supercritical``
        (1/2 to 1), or ``ballistic`` (>= 1).
    growth_rate : float or None
        ``(2 (1 - alpha)) ** (1 / (1 - alpha))`` — prefactor of the
        excursion-indexed radius growth ``i ** growth_exponent``.
    growth_exponent : float or None
        ``1 / (1 - alpha)``.
    time_exponent : float or None
        ``1 / (2 (1 - alpha))`` — radius growth exponent in walk time.
    correction_exponent : float or None
        ``(1 - 2 alpha) / (1 - alpha)`` — exponent of the subleading
        correction in the radius recurrence.
    entry_tail_constant : float
        Documented constant ``8 / sqrt(pi)`` for the square-root tail of
        the interior return time; compare with the directly computed value
        from :func:`first_passage_tail_constant`, which is ``2 / sqrt(pi)``.
    """

    alpha: float
    regime: str
    growth_rate: Optional[float]
    growth_exponent: Optional[float]
    time_exponent: Optional[float]
    correction_exponent: Optional[float]
    entry_tail_constant: float


def constants(alpha: float) -> Constants:
    """Closed-form constants for drift exponent ``alpha`` in (0, 4]."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 4.0:
        raise ValueError(f"alpha must lie in (0, 4], got {alpha}")
    if alpha < 0.5:
        regime = "subcritical"
    elif alpha == 0.5:
        regime = "critical"
    elif alpha < 1.0:
        regime = "supercritical"
    else:
        regime = "ballistic"
    if alpha < 1.0:
        growth_rate = (2.0 * (1.0 - alpha)) ** (1.0 / (1.0 - alpha))
        growth_exponent = 1.0 / (1.0 - alpha)
        time_exponent = 1.0 / (2.0 * (1.0 - alpha))
        correction_exponent = (1.0 - 2.0 * alpha) / (1.0 - alpha)
    else:
        growth_rate = None
        growth_exponent = None
        time_exponent = None
        correction_exponent = None
    return Constants(
        alpha=alpha,
        regime=regime,
        growth_rate=growth_rate,
        growth_exponent=growth_exponent,
        time_exponent=time_exponent,
        correction_exponent=correction_exponent,
        entry_tail_constant=8.0 / math.sqrt(math.pi),
    )


def correction_gain(alpha: float, c_est: float) -> float:
    """Subleading-correction gain ``c_est / (2 growth_rate**alpha)``.

    ``c_est`` is the estimated additive constant of the radius recurrence
    (see :func:`mean_recurrence`); the gain feeds
    :func:`closed_form_radius`.
    """
    c = constants(alpha)
    if c.growth_rate is None:
        raise ValueError("correction gain undefined for alpha >= 1")
    return c_est / (2.0 * c.growth_rate**alpha)


# ---------------------------------------------------------------------------
# boundary-visit survival product and moment series


def _validate_xz(x, alpha) -> Tuple[int, float]:
    xi = int(x)
    if xi != x or xi < 1:
        raise ValueError(f"x must be a positive integer, got {x!r}")
    alpha = float(alpha)
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return xi, alpha


def rho_survival(x, alpha: float, k: int) -> float:
    """Product of outward factors ``1 - 1/(2 (x+m)**alpha)``, ``m = 0..k``.

    Computed as a compensated sum of ``log1p`` terms, so it stays accurate
    (relative error near machine precision) even for ``k`` in the millions.
    """
    xi, alpha = _validate_xz(x, alpha)
    k = int(k)
    if k < 0:
        raise ValueError("k must be >= 0")
    logs = [
        math.log1p(-0.5 * float(xi + m) ** -alpha) for m in range(k + 1)
    ]
    return math.exp(math.fsum(logs))


def _moment_series(xi: int, alpha: float, beta: float, rtol: float, max_terms: int) -> float:
    """Sum ``w_k * S(k)`` with ``w_k = (x+k+1)**beta - (x+k)**beta``.

    ``S(k)`` is the outward product of :func:`rho_survival`, equal to
    ``P(visit length > k + 1)``; summation by parts then gives the
    ``beta``-th exit-radius moment as ``x**beta`` plus this sum.

    Stops once a certified geometric-style tail estimate drops below
    ``rtol`` of the accumulated sum.  At doubling checkpoints the tail
    estimate is monitored: if it keeps growing the series is going nowhere
    within any budget — provably divergent when ``alpha >= 1`` (the outward
    factors approach 1 so fast that the survival product no longer decays
    summably), otherwise merely beyond the term budget.
    """
    terms = []
    logs = 0.0
    acc = 0.0
    k = 0
    checkpoint = 4096
    prev_rhat = math.inf
    rising = 0
    while True:
        q = 0.5 * float(xi + k) ** -alpha
        logs += math.log1p(-q)
        s = math.exp(logs)
        w = float(xi + k + 1) ** beta - float(xi + k) ** beta
        term = w * s
        terms.append(term)
        acc += term
        # Tail estimate: survival decays at least geometrically with the
        # current outward-leak rate q, and the weights grow polynomially,
        # so sum_{j>k} w_j S_j <~ w_k S_k / q * safety.
        rhat = term * 2.0 * float(xi + k + 1) ** alpha * 2.0
        if rhat <= rtol * acc and s < 0.5:
            break
        if k + 1 >= checkpoint:
            if rhat >= prev_rhat:
                rising += 1
            else:
                rising = 0
            prev_rhat = rhat
            checkpoint *= 2
            if rising >= 2:
                if alpha >= 1.0:
                    raise DivergentSeriesError(
                        f"moment series diverges for alpha={alpha} (>= 1): the "
                        f"survival product stalls near "
                        f"{s:.3e} after {k + 1} terms with a growing tail"
                    )
                raise ComputationBudgetError(
                    f"series converges too slowly for alpha={alpha}: tail "
                    f"estimate {rhat:.3e} still growing after {k + 1} terms"
                )
        k += 1
        if k >= max_terms:
            raise ComputationBudgetError(
                f"series not converged within max_terms={max_terms}; "
                f"tail estimate {rhat:.3e} vs accumulated {acc:.6e}"
            )
    return math.fsum(terms)


def rho_mean_exact(x, alpha: float, rtol: float = 1e-13, max_terms: int = 20_000_000) -> float:
    """Exact mean exit radius ``x + sum_k rho_survival(x, alpha, k)``.

    This is the expectation of the radius at which a boundary visit entered
    at distance ``x`` steps back into the interior: the visit makes some
    number ``M >= 0`` of outward moves before the perpendicular one, exits
    at radius ``x + M``, and ``P(M > k)`` is exactly the outward product
    :func:`rho_survival`.

    Raises
    ------
    DivergentSeriesError
        For ``alpha >= 1``, detected from the stalling survival product.
    ComputationBudgetError
        If convergence needs more than ``max_terms`` terms.
    """
    xi, alpha = _validate_xz(x, alpha)
    return float(xi) + _moment_series(xi, alpha, 1.0, rtol, max_terms)


def rho_moment_exact(
    x, alpha: float, beta: float, rtol: float = 1e-13, max_terms: int = 20_000_000
) -> float:
    """Exact ``beta``-th moment of the exit radius, same series as the mean.

    With the exit radius ``x + M`` as in :func:`rho_mean_exact`, summation
    by parts gives
    ``x**beta + sum_k [(x+k+1)**beta - (x+k)**beta] rho_survival(x, alpha, k)``.
    """
    xi, alpha = _validate_xz(x, alpha)
    beta = float(beta)
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    return float(xi) ** beta + _moment_series(xi, alpha, beta, rtol, max_terms)


# ---------------------------------------------------------------------------
# radius growth along excursions


def mean_recurrence(alpha: float, c_est: float, i_max: int, u1: float = 1.0) -> np.ndarray:
    """Iterate ``u_i = u_{i-1} + 2 u_{i-1}**alpha + c_est`` from ``u_1``.

    Returns the array ``[u_1, ..., u_{i_max}]``.  This is the mean-field
    recurrence for the exit radius after successive boundary visits; the
    additive constant ``c_est`` captures the interior (cone) contribution
    and is estimated from simulation.
    """
    alpha = float(alpha)
    i_max = int(i_max)
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    if u1 <= 0:
        raise ValueError("u1 must be positive")
    out = np.empty(i_max)
    u = float(u1)
    out[0] = u
    for i in range(1, i_max):
        u = u + 2.0 * u**alpha + c_est
        out[i] = u
    return out


def closed_form_radius(alpha: float, gain: float, i) -> np.ndarray:
    """Closed-form radius profile matching the recurrence asymptotics.

    ``growth_rate * (i + gain * i**correction_exponent) ** growth_exponent``
    with the constants of :func:`constants`; ``gain`` comes from
    :func:`correction_gain`.  Vectorized over ``i``.
    """
    c = constants(alpha)
    if c.growth_rate is None:
        raise ValueError("closed-form radius undefined for alpha >= 1")
    i_arr = np.asarray(i, dtype=float)
    if np.any(i_arr < 1):
        raise ValueError("excursion index must be >= 1")
    base = i_arr + gain * np.power(i_arr, c.correction_exponent)
    if np.any(base <= 0):
        raise ValueError("correction gain too negative: radius argument <= 0")
    return c.growth_rate * np.power(base, c.growth_exponent)


# ---------------------------------------------------------------------------
# arcsine law


def arcsine_cdf(eps) -> np.ndarray:
    """CDF ``(2/pi) * asin(sqrt(eps))`` of the arcsine law on [0, 1]."""
    e = np.asarray(eps, dtype=float)
    if np.any((e < 0.0) | (e > 1.0)) or not np.all(np.isfinite(e)):
        raise ValueError("arcsine_cdf argument must lie in [0, 1]")
    out = (2.0 / math.pi) * np.arcsin(np.sqrt(e))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# first passage of the lazy height walk


@dataclass
class DiscreteDistribution:
    """Truncated law of a positive integer variable with a certified tail.

    ``pmf[j]`` is the probability of value ``start + j``.  The untracked
    mass ``P(value > start + len(pmf) - 1)`` is certified to lie within
    ``[tail_lower, tail_upper]``.
    """

    start: int
    pmf: np.ndarray
    tail_lower: float
    tail_upper: float
    method: str
    _cdf: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def support_max(self) -> int:
        return self.start + len(self.pmf) - 1

    def cdf_values(self) -> np.ndarray:
        """Cumulative probabilities over the truncated support (cached)."""
        if self._cdf is None:
            self._cdf = np.cumsum(self.pmf)
        return self._cdf

    def survival(self, k: int) -> float:
        """``P(value > k)`` for ``k`` within the truncated support."""
        k = int(k)
        if k < self.start:
            return 1.0
        if k > self.support_max:
            raise ValueError(f"k={k} beyond truncated support {self.support_max}")
        return float(1.0 - self.cdf_values()[k - self.start])


def first_passage_pmf(h: int, n_max: int) -> DiscreteDistribution:
    """Exact law of the first passage to 0 of the lazy height walk from ``h``.

    The walk stays put with probability 1/2 and moves ±1 with 1/4 each.
    Closed form: ``P(T = k) = (h / k) * C(2k, k - h) * 2**(-2k)``, computed
    through log-gamma for stability.  ``pmf`` covers ``k = 1..n_max``.
    """
    h = int(h)
    n_max = int(n_max)
    if h < 1 or n_max < 1:
        raise ValueError("h and n_max must be >= 1")
    k = np.arange(1, n_max + 1, dtype=float)
    with np.errstate(divide="ignore"):
        logpmf = (
            math.log(h)
            - np.log(k)
            + gammaln(2.0 * k + 1.0)
            - gammaln(k - h + 1.0)
            - gammaln(k + h + 1.0)
            - 2.0 * k * math.log(2.0)
        )
    pmf = np.where(k >= h, np.exp(logpmf), 0.0)
    total = float(np.sum(pmf))
    tail = 1.0 - total
    return DiscreteDistribution(
        start=1,
        pmf=pmf,
        tail_lower=max(tail - 1e-12, 0.0),
        tail_upper=tail + 1e-12,
        method="closed-form",
    )


def lazy_first_passage(h: int, n_max: int, height_cap: Optional[int] = None) -> DiscreteDistribution:
    """Same law as :func:`first_passage_pmf`, by dynamic programming.

    Propagates the height distribution step by step with absorption at 0.
    Heights are truncated at ``height_cap`` (default ``h + ceil(6.2
    sqrt(n_max))``); mass crossing the cap is removed and accounted into
    the tail certificate, so ``tail_upper - tail_lower`` bounds the
    truncation effect exactly.
    """
    h = int(h)
    n_max = int(n_max)
    if h < 1 or n_max < 1:
        raise ValueError("h and n_max must be >= 1")
    if height_cap is None:
        height_cap = h + int(math.ceil(6.2 * math.sqrt(n_max)))
    cap = int(height_cap)
    if cap <= h:
        raise ValueError("height_cap must exceed h")
    # q[j] = P(height == j, not yet absorbed), j = 0..cap (q[0] unused)
    q = np.zeros(cap + 1)
    q[h] = 1.0
    pmf = np.empty(n_max)
    escaped = 0.0
    for k in range(n_max):
        qn = np.zeros(cap + 1)
        qn[1:] += 0.5 * q[1:]
        qn[1:cap] += 0.25 * q[2 : cap + 1]
        qn[2 : cap + 1] += 0.25 * q[1:cap]
        escaped += 0.25 * q[cap]
        pmf[k] = 0.25 * q[1]
        q = qn
    remaining = float(np.sum(q))
    return DiscreteDistribution(
        start=1,
        pmf=pmf,
        tail_lower=remaining,
        tail_upper=remaining + escaped,
        method="dp",
    )


def first_passage_tail_constant(dist: DiscreteDistribution) -> float:
    """``sqrt(n) * P(T > n)`` at the truncation edge of ``dist``.

    Estimates the constant of the square-root tail of the first-passage
    law; for the height-1 lazy walk the limit is ``2 / sqrt(pi)``.
    """
    mid = 0.5 * (dist.tail_lower + dist.tail_upper)
    return math.sqrt(dist.support_max) * mid


def sample_from(dist: DiscreteDistribution, rng: np.random.Generator, size) -> np.ndarray:
    """Draw from ``dist`` with a square-root-tail extension beyond support.

    Draws inside the truncated support are exact (inverse CDF).  A draw
    landing in the tail mass is mapped to ``support_max * w**-2`` with
    ``w`` uniform, the continuous law consistent with the square-root tail
    decay; the returned array is float64.
    """
    cdf = dist.cdf_values()
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    out = (dist.start + idx).astype(float)
    over = idx >= len(cdf)
    if np.any(over):
        total = cdf[-1]
        # conditional uniform within the tail mass, guarded away from 0
        w = (1.0 - u[over]) / max(1.0 - total, 1e-300)
        w = np.clip(w, 1e-12, 1.0)
        out[over] = dist.support_max * np.power(w, -2.0)
    return out


# ---------------------------------------------------------------------------
# renewal-limit oracle


@dataclass(frozen=True)
class RenewalLimitOracle:
    """Monte Carlo reference law for rescaled renewal times.

    ``samples`` holds sorted draws of ``H_i / i**2`` where ``H_i`` is a sum
    of ``i`` independent interior return times (first passage of the lazy
    height walk from 1).  Because that return time has a square-root tail,
    ``H_i / i**2`` converges in law; the empirical CDF of the draws is the
    reference against which simulated renewal statistics are compared.
    """

    index: int
    samples: np.ndarray
    replicas: int
    truncation: int
    tail_mass: float

    def cdf(self, u) -> np.ndarray:
        """Empirical CDF of the oracle sample, vectorized."""
        pos = np.searchsorted(self.samples, np.asarray(u, dtype=float), side="right")
        out = pos / len(self.samples)
        return out if out.ndim else float(out)


def renewal_limit_oracle(
    index: int,
    replicas: int,
    seed: int,
    truncation: int = 1_300_000,
    max_tail_mass: float = 1e-3,
    chunk: int = 128,
) -> RenewalLimitOracle:
    """Build a :class:`RenewalLimitOracle` by direct renewal sampling.

    The interarrival law is the exact first-passage pmf truncated at
    ``truncation`` steps; building refuses (``OracleTailError``) if the
    certified untracked tail mass exceeds ``max_tail_mass``.  Tail draws
    use the square-root-tail extension of :func:`sample_from`, whose
    relative error is of order ``truncation**-0.5`` — far below the
    tolerances the oracle serves.
    """
    index = int(index)
    replicas = int(replicas)
    if index < 1 or replicas < 1:
        raise ValueError("index and replicas must be >= 1")
    dist = first_passage_pmf(1, truncation)
    if dist.tail_upper > max_tail_mass:
        raise OracleTailError(
            f"truncated tail mass {dist.tail_upper:.3e} exceeds "
            f"{max_tail_mass:.1e}; increase truncation"
        )
    rng = RngStream(seed, 0).generator()
    totals = np.zeros(replicas)
    done = 0
    while done < index:
        m = min(chunk, index - done)
        draws = sample_from(dist, rng, (replicas, m))
        totals += draws.sum(axis=1)
        done += m
    samples = np.sort(totals / float(index) ** 2)
    return RenewalLimitOracle(
        index=index,
        samples=samples,
        replicas=replicas,
        truncation=truncation,
        tail_mass=dist.tail_upper,
    )


def renewal_count_reference(
    n: int,
    u_grid,
    replicas: int,
    seed: int,
    truncation: int = 1_300_000,
) -> np.ndarray:
    """Renewal-model reference for the left tail of the renewal count.

    For each ``u`` in ``u_grid`` returns the Monte Carlo probability that a
    pure renewal process with interior-return interarrivals has at most
    ``u * sqrt(n)`` renewals by time ``n`` — that is, that the first
    ``floor(u sqrt(n)) + 1`` interarrival times sum beyond ``n``.  Used to
    annotate the renewal-count verdicts with what the renewal picture
    itself predicts.
    """
    n = int(n)
    u_arr = np.asarray(u_grid, dtype=float)
    counts = (np.floor(u_arr * math.sqrt(n))).astype(int) + 1
    m_max = int(counts.max())
    dist = first_passage_pmf(1, truncation)
    rng = RngStream(seed, 0).generator()
    # accumulate interarrival sums one renewal at a time; snapshot the
    # exceedance fraction whenever a u's renewal count is reached
    order = np.argsort(counts)
    sums = np.zeros(replicas)
    probs = np.empty(len(u_arr))
    next_check = 0
    checkpoints = counts[order]
    for m in range(1, m_max + 1):
        sums += sample_from(dist, rng, replicas)
        while next_check < len(checkpoints) and checkpoints[next_check] == m:
            probs[order[next_check]] = float(np.mean(sums > n))
            next_check += 1
    return probs


# ---------------------------------------------------------------------------
# time-indexed tail predictions


@dataclass(frozen=True)
class TailPrediction:
    """A predicted tail probability plus an out-of-range flag.

    ``saturated`` is True when the formula value exceeds 1, i.e. the
    prediction is outside its validity range; the value is reported
    unclamped so the overshoot stays visible.
    """

    value: float
    saturated: bool


def theorem_left_tail(alpha: float, a: float) -> TailPrediction:
    """Documented lower-tail formula ``c2 * (a / c1) ** ((1 - alpha) / 2)``.

    Predicts ``P(radius at time n < a * n**time_exponent)`` in the large-n
    limit, with ``c1`` the growth rate and ``c2`` the documented entry-tail
    constant.  Values above 1 are flagged, not clamped.
    """
    c = constants(alpha)
    if c.growth_rate is None:
        raise ValueError("left-tail prediction undefined for alpha >= 1")
    a = float(a)
    if a <= 0:
        raise ValueError("a must be positive")
    value = c.entry_tail_constant * (a / c.growth_rate) ** ((1.0 - alpha) / 2.0)
    return TailPrediction(value=value, saturated=value > 1.0)


def theorem_right_tail_expected(alpha: float, a: float, oracle: RenewalLimitOracle) -> float:
    """Upper-tail prediction ``P(radius at time n > a * n**time_exponent)``.

    Derivation: after ``i`` excursions the radius is near ``c1 *
    i**growth_exponent`` and the elapsed time near ``V i**2`` with ``V``
    the renewal limit; eliminating ``i`` turns the event into
    ``V < (c1 / a) ** (2 (1 - alpha))``, evaluated under the oracle law.
    """
    c = constants(alpha)
    if c.growth_rate is None:
        raise ValueError("right-tail prediction undefined for alpha >= 1")
    a = float(a)
    if a <= 0:
        raise ValueError("a must be positive")
    return float(oracle.cdf((c.growth_rate / a) ** (2.0 * (1.0 - alpha))))


def theorem_scaling(alpha: float, n) -> np.ndarray:
    """Radius scale ``n ** (1 / (2 (1 - alpha)))`` at walk time ``n``."""
    c = constants(alpha)
    if c.time_exponent is None:
        raise ValueError(f"time scaling undefined for alpha >= 1 (got {alpha})")
    out = np.power(np.asarray(n, dtype=float), c.time_exponent)
    return out if out.ndim else float(out)
