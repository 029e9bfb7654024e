"""Named verification targets with quantitative verdict reports.

Each target states one limit-theorem-level claim about the walk family,
runs the smallest batch that can test it at a pre-registered tolerance,
and returns a :class:`Verdict` carrying the claim, the measured values,
the expected values with their provenance, and the tolerance rationale —
never a bare pass/fail bit.

Tolerances are deliberately generous: the claims are asymptotic and the
batches are desk-scale.  Where a documented formula disagrees with an
exact oracle or with the measured law, the verdict reports both sides and
fails honestly rather than recalibrating around the discrepancy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

import numpy as np

from .analytics import (
    DivergentSeriesError,
    arcsine_cdf,
    constants,
    correction_gain,
    renewal_count_reference,
    renewal_limit_oracle,
    rho_mean_exact,
    theorem_left_tail,
    theorem_right_tail_expected,
)
from .runner import BatchResult, ExperimentConfig, UsageError, run_batch
from .stats import ks_distance, tail_exponent_fit, variance_scaling

__all__ = [
    "TARGETS",
    "TargetSpec",
    "Verdict",
    "VerifySession",
    "list_targets",
    "run_target",
]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class Verdict:
    """Outcome of one verification target.

    ``measured`` and ``expected`` are parallel dictionaries of named
    quantities; ``provenance`` states where the expected values come from
    (closed form, exact oracle, calibration run); ``headline`` is a short
    human-readable comparison used in the one-line report form.
    """

    target: str
    claim: str
    passed: bool
    headline: str
    measured: Dict[str, object]
    expected: Dict[str, object]
    tolerance: str
    provenance: str
    config: Dict[str, object]
    notes: List[str] = field(default_factory=list)

    def format_line(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"{word} {self.target}: {self.headline}"

    def format_report(self) -> str:
        lines = [
            f"target:     {self.target}",
            f"claim:      {self.claim}",
            f"config:     {json.dumps(_jsonable(self.config), sort_keys=True)}",
            f"measured:   {json.dumps(_jsonable(self.measured), sort_keys=True)}",
            f"expected:   {json.dumps(_jsonable(self.expected), sort_keys=True)}",
            f"provenance: {self.provenance}",
            f"tolerance:  {self.tolerance}",
        ]
        for note in self.notes:
            lines.append(f"note:       {note}")
        lines.append(f"verdict:    {self.format_line()}")
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = {
            "target": self.target,
            "claim": self.claim,
            "passed": self.passed,
            "headline": self.headline,
            "measured": _jsonable(self.measured),
            "expected": _jsonable(self.expected),
            "tolerance": self.tolerance,
            "provenance": self.provenance,
            "config": _jsonable(self.config),
            "notes": list(self.notes),
        }
        return json.dumps(payload, sort_keys=True)


class VerifySession:
    """Caches batches and oracles shared between targets.

    Several targets draw on the same batch configuration; running them
    through one session executes each batch once.  ``progress`` is an
    optional ``(done, total)`` callback forwarded to the batch runner.
    """

    def __init__(self, progress: Optional[Callable[[int, int], None]] = None):
        self._batches: Dict[str, BatchResult] = {}
        self._oracles: Dict[tuple, object] = {}
        self.progress = progress

    def batch(self, config: ExperimentConfig) -> BatchResult:
        key = config.config_hash()
        if key not in self._batches:
            self._batches[key] = run_batch(config, progress=self.progress)
        return self._batches[key]

    def oracle(self, index: int, replicas: int, seed: int):
        key = (index, replicas, seed)
        if key not in self._oracles:
            self._oracles[key] = renewal_limit_oracle(index, replicas, seed)
        return self._oracles[key]


def _cfg_summary(cfg: ExperimentConfig) -> Dict[str, object]:
    out = {
        "model": cfg.model,
        "alpha": cfg.alpha,
        "replicas": cfg.replicas,
        "seed": cfg.seed,
        "start": list(cfg.start),
    }
    if cfg.n_steps is not None:
        out["n_steps"] = cfg.n_steps
    else:
        out["excursions"] = cfg.excursions
    return out


def _ok(batch: BatchResult, notes: List[str]) -> np.ndarray:
    """Mask of clean replicas; appends a note when any were dropped."""
    if batch.dropped:
        notes.append(
            f"{batch.dropped} of {batch.config.replicas} replicas hit the "
            "time cap and were dropped from the estimate"
        )
    return batch.ok_mask


def _apply(cfg: ExperimentConfig, replicas: Optional[int], seed: Optional[int]) -> ExperimentConfig:
    kwargs = {}
    if replicas is not None:
        kwargs["replicas"] = replicas
    if seed is not None:
        kwargs["seed"] = seed
    return replace(cfg, **kwargs) if kwargs else cfg


# ---------------------------------------------------------------------------
# shared batch configurations


def _batch_excursion_growth() -> ExperimentConfig:
    return ExperimentConfig(
        model="quarter-plane",
        alpha=0.2,
        excursions=10_000,
        replicas=2_000,
        seed=101,
        collect_exits=True,
        checkpoints=(100, 1_000, 10_000),
    )


# block edges chosen so each block's Monte Carlo error is roughly equal: the
# per-excursion approach increments have variance growing like the radius
# (their tail is ~1/s cut off at the current radius), so block width must
# grow like i^(1/(1-alpha)) to balance
_RECURRENCE_EDGES = (1_000, 1_400, 2_100, 3_300, 5_600, 10_000)


def _batch_recurrence() -> ExperimentConfig:
    return ExperimentConfig(
        model="quarter-plane",
        alpha=0.2,
        excursions=10_000,
        replicas=16_000,
        seed=102,
        checkpoints=_RECURRENCE_EDGES,
    )


def _batch_coupled_time() -> ExperimentConfig:
    return ExperimentConfig(
        model="coupled-half-plane", alpha=0.25, n_steps=100_000, replicas=10_000, seed=202
    )


def _batch_quarter_time() -> ExperimentConfig:
    return ExperimentConfig(
        model="quarter-plane", alpha=0.25, n_steps=100_000, replicas=100_000, seed=303
    )


def _batch_commitment() -> ExperimentConfig:
    # sized for the coupled-law comparison (1e4 per side); the commitment
    # fraction itself only reads the first 1e3 replicas
    return ExperimentConfig(
        model="quarter-plane", alpha=0.25, n_steps=1_000_000, replicas=10_000, seed=404
    )


def _batch_coupled_commitment() -> ExperimentConfig:
    return ExperimentConfig(
        model="coupled-half-plane", alpha=0.25, n_steps=1_000_000, replicas=10_000, seed=909
    )


def _batch_coupled_excursions() -> ExperimentConfig:
    return ExperimentConfig(
        model="coupled-half-plane", alpha=0.25, excursions=1_000, replicas=10_000, seed=505
    )


_ORACLE_INDEX = 1_000
_ORACLE_REPLICAS = 50_000
_ORACLE_SEED = 505_001


# ---------------------------------------------------------------------------
# targets


def _t_mean_asymptotic(session, replicas=None, seed=None) -> Verdict:
    alphas = (0.2, 0.3, 0.4)
    xs = (10**3, 10**4, 10**5, 10**6)
    rows = []
    worst = 0.0
    all_ok = True
    for a in alphas:
        for x in xs:
            exact = rho_mean_exact(x, a)
            asym = x + 2.0 * x**a - 1.5 - x ** (-a) / 6.0
            tol = 10.0 * x ** (-2.0 * a)
            diff = exact - asym
            ok = abs(diff) <= tol
            all_ok &= ok
            worst = max(worst, abs(diff) / tol)
            rows.append(
                {
                    "alpha": a,
                    "x": x,
                    "exact": exact,
                    "asymptotic": asym,
                    "diff": diff,
                    "tol": tol,
                    "ok": ok,
                }
            )
    n_fail = sum(not r["ok"] for r in rows)
    return Verdict(
        target="mean-asymptotic",
        claim=(
            "the exact mean exit height from (x, 0) after one excursion, "
            "E(Zbar at rho) = x + sum over k>=0 of prod_{m=0..k} "
            "(1 - 1/(2 (x+m)^alpha)), matches the stated expansion "
            "x + 2 x^alpha - 3/2 - x^(-alpha)/6 to within 10 x^(-2 alpha)"
        ),
        passed=all_ok,
        headline=(
            f"{n_fail}/{len(rows)} grid points outside tolerance; "
            f"worst |diff|/tol = {worst:.3g}"
        ),
        measured={"grid": rows},
        expected={
            "formula": "x + 2 x^alpha - 3/2 - x^(-alpha)/6",
            "constant_term_series": (
                "series summation gives constant -1 (with the convention that a "
                "boundary visit always lasts at least one step), not -3/2"
            ),
        },
        tolerance="|exact - asymptotic| <= 10 x^(-2 alpha), each of 12 grid points",
        provenance="closed-form series summation (exact) vs stated asymptotic expansion",
        config={"alphas": list(alphas), "x_grid": list(xs)},
        notes=[
            "the stated constant -3/2 sits between the two natural step-count "
            "conventions (-1 and -2); the exact series tracks x + 2 x^alpha - 1 "
            "+ 4 alpha x^(2 alpha - 1) closely, so the diff approaches 1/2, far "
            "above the shrinking tolerance at large x"
        ],
    )


def _t_lln(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_excursion_growth(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    # the stated check uses 1e3 replicas; restrict to the first 1e3 replica
    # streams of the shared batch (streams depend only on (seed, index))
    if replicas is None and cfg.replicas > 1_000:
        ok = ok & (np.arange(cfg.replicas) < 1_000)
    c = constants(cfg.alpha)
    i = cfg.excursions
    scale = c.growth_rate * float(i) ** c.growth_exponent
    ratios = batch.z_exit[ok, i - 1] / scale
    mean = float(np.mean(ratios))
    se = float(np.std(ratios, ddof=1) / math.sqrt(len(ratios)))
    passed = abs(mean - 1.0) <= 0.15
    cp_means = {
        int(cpi): float(
            np.mean(batch.z_exit[ok, cpi - 1] / (c.growth_rate * float(cpi) ** c.growth_exponent))
        )
        for cpi in cfg.checkpoints
    }
    return Verdict(
        target="lln",
        claim=(
            "after i excursions the exit height obeys a law of large numbers: "
            "Zbar at rho_i, divided by c1 * i^(1/(1-alpha)) with "
            "c1 = (2(1-alpha))^(1/(1-alpha)), tends to 1 in probability"
        ),
        passed=passed,
        headline=f"mean normalized exit height {mean:.4f} vs 1.0 (within 15%: {passed})",
        measured={"mean_ratio": mean, "se": se, "ratio_by_index": cp_means},
        expected={"mean_ratio": 1.0, "c1": c.growth_rate, "scale_at_i": scale},
        tolerance="|mean ratio - 1| <= 0.15 (slow convergence at i = 1e4; calibrated band)",
        provenance="closed-form constant c1; Monte Carlo mean",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_recurrence_sandwich(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_recurrence(), replicas, seed)
    batch = session.batch(cfg)
    curve = session.batch(_batch_excursion_growth())
    notes: List[str] = []
    ok = _ok(batch, notes)
    ok_curve = _ok(curve, notes)
    # mean exit-height curve, for the 2 m^alpha correction term only (its
    # error enters damped by a factor ~ alpha m^(alpha-1), i.e. ~1e-5 here)
    m = np.mean(curve.z_exit[ok_curve, :], axis=0)
    # per-replica exit heights at the block edges, reconstructed from the
    # accumulated gain/approach sums: Zbar at rho_i = Zbar(start) + gains +
    # approach increments
    z0 = max(cfg.start)
    edges = _RECURRENCE_EDGES
    z_at = {e: z0 + batch.cp_gain[ok, j] + batch.cp_cone[ok, j] for j, e in enumerate(edges)}
    block_stats = []
    band_lo, band_hi = math.inf, -math.inf
    num = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        count = b - a
        # telescoped block mean: the sum over i in (a, b] of
        # d_i = m_i - m_{i-1} - 2 m_{i-1}^alpha collapses to the endpoint
        # difference minus the accumulated correction, so its Monte Carlo
        # error is that of the per-replica endpoint increment
        w = (z_at[b] - z_at[a]) / count
        correction = 2.0 * np.mean(m[a - 1 : b - 1] ** cfg.alpha)
        bm = float(np.mean(w) - correction)
        bse = float(np.std(w, ddof=1) / math.sqrt(len(w)))
        block_stats.append({"i_range": [int(a) + 1, int(b)], "mean": bm, "se": bse})
        band_lo = min(band_lo, bm - 2 * bse)
        band_hi = max(band_hi, bm + 2 * bse)
        num += bm * count
    width = band_hi - band_lo
    c_est = num / (edges[-1] - edges[0])
    passed = width <= 1.0
    return Verdict(
        target="recurrence-sandwich",
        claim=(
            "the mean exit height nearly satisfies the recurrence "
            "m_i = m_{i-1} + 2 m_{i-1}^alpha + c: the residual increments "
            "d_i = m_i - m_{i-1} - 2 m_{i-1}^alpha stay inside a constant band "
            "of width at most 1 across i in [1e3, 1e4]"
        ),
        passed=passed,
        headline=f"residual band [{band_lo:.3f}, {band_hi:.3f}] width {width:.3f} (<= 1: {passed})",
        measured={
            "c_estimate": c_est,
            "band": [band_lo, band_hi],
            "band_width": width,
            "blocks": block_stats,
            "correction_gain": correction_gain(cfg.alpha, c_est),
        },
        expected={"band_width_max": 1.0, "residual": "a single constant c"},
        tolerance="union of (block mean +- 2 se) over 5 variance-balanced blocks spans <= 1",
        provenance="Monte Carlo block means; recurrence form is the closed-form growth law",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_nn_left_tail(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_coupled_time(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    n = cfg.n_steps
    counts = batch.scalars["n_exc"][ok]
    u_grid = np.geomspace(0.02, 0.3, 7)
    thresholds = np.floor(u_grid * math.sqrt(n))
    phat = np.array([float(np.mean(counts <= thr)) for thr in thresholds])
    fit = tail_exponent_fit(u_grid, phat)
    renewal = renewal_count_reference(n, u_grid, replicas=20_000, seed=2025)
    renewal_fit = tail_exponent_fit(u_grid, renewal)
    passed = abs(fit.slope - 0.5) <= 0.1
    c2_doc = 8.0 / math.sqrt(math.pi)
    rows = [
        {
            "u": float(u),
            "threshold": int(t),
            "p_measured": float(p),
            "p_renewal_model": float(rv),
        }
        for u, t, p, rv in zip(u_grid, thresholds, phat, renewal)
    ]
    return Verdict(
        target="nn-left-tail",
        claim=(
            "the probability that the half-plane-coupled walk completes at most "
            "u sqrt(n) excursions by time n behaves like c2 * u^(1/2) for small "
            "u, i.e. a log-log fit over u in [0.02, 0.3] has slope 0.5"
        ),
        passed=passed,
        headline=f"fitted slope {fit.slope:.3f} vs 0.5 +- 0.1 (stderr {fit.stderr:.3f})",
        measured={
            "slope": fit.slope,
            "slope_stderr": fit.stderr,
            "constant": math.exp(fit.intercept),
            "r_squared": fit.r_squared,
            "grid": rows,
        },
        expected={
            "slope": 0.5,
            "documented_c2": c2_doc,
            "renewal_model_slope": renewal_fit.slope,
            "renewal_model_constant": math.exp(renewal_fit.intercept),
        },
        tolerance="|slope - 0.5| <= 0.1 from a log-log least-squares fit over 7 grid points",
        provenance=(
            "Monte Carlo walk counts; renewal reference from the exact "
            "interior-return-time law (dynamic-programming oracle)"
        ),
        config=_cfg_summary(cfg),
        notes=[
            "measured tail is nearly linear in u and agrees with the pure "
            "renewal model, which also gives slope close to 1; both disagree "
            f"with the stated exponent 1/2 and constant c2 = {c2_doc:.3f}",
            "renewal count K_n <= k is the event that k+1 interarrival sums "
            "exceed n; with interarrival tail ~ (2/sqrt(pi)) t^(-1/2) the "
            "stable-subordinator limit gives P ~ u * 2/sqrt(pi) * "
            "sqrt(2/pi)-type linear behaviour, not a square root",
        ],
    )


def _t_theorem_left_tail(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_quarter_time(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    z = batch.scalars["z_final"][ok].astype(float)
    n = cfg.n_steps
    c = constants(cfg.alpha)
    scale = float(n) ** c.time_exponent
    a_grid = np.geomspace(0.05, 1.2, 25)
    counts = np.array([int(np.sum(z <= a * scale)) for a in a_grid])
    lo, hi = 20, len(z) // 10
    keep = (counts >= lo) & (counts <= hi)
    if int(np.sum(keep)) < 3:
        raise UsageError(
            "theorem-left-tail: fewer than 3 usable grid points in the count "
            f"window [{lo}, {hi}]; increase replicas"
        )
    a_used = a_grid[keep]
    p_used = counts[keep] / len(z)
    fit = tail_exponent_fit(a_used, p_used)
    target_slope = (1.0 - cfg.alpha) / 2.0
    passed = abs(fit.slope - target_slope) <= 0.1
    doc0 = theorem_left_tail(cfg.alpha, float(a_used[0]))
    return Verdict(
        target="theorem-left-tail",
        claim=(
            "the dominant coordinate at time n satisfies "
            "P(Zbar_n <= a n^(1/(2(1-alpha)))) ~ c2 (a/c1)^((1-alpha)/2): the "
            "log-log slope in a over the window where tail counts lie in "
            "[20, replicas/10] equals (1-alpha)/2"
        ),
        passed=passed,
        headline=(
            f"fitted slope {fit.slope:.3f} vs {target_slope:.3f} +- 0.1 "
            f"(stderr {fit.stderr:.3f})"
        ),
        measured={
            "slope": fit.slope,
            "slope_stderr": fit.stderr,
            "r_squared": fit.r_squared,
            "a_window": [float(a_used[0]), float(a_used[-1])],
            "points_used": int(np.sum(keep)),
            "p_at_window": [float(p_used[0]), float(p_used[-1])],
        },
        expected={
            "slope": target_slope,
            "documented_prediction_at_window_start": doc0.value,
            "documented_prediction_saturated": doc0.saturated,
        },
        tolerance="|slope - (1-alpha)/2| <= 0.1 over the count-windowed a-range",
        provenance="Monte Carlo tail counts; exponent from the stated limit law",
        config=_cfg_summary(cfg),
        notes=notes
        + [
            "the renewal picture (time ~ V i^2, radius ~ c1 i^(1/(1-alpha))) "
            "predicts an a-exponent of 2 * (1-alpha)/2 = "
            f"{2 * target_slope:.3f} above the diffusive floor, already twice "
            "the stated value",
            "diffusive floor: suppressing plain diffusion keeps Zbar_n above "
            f"~sqrt(n) = {math.sqrt(n):.0f} = {math.sqrt(n) / scale:.3f} * scale; "
            "the count window at this replica count sits at or below that "
            "floor, where the tail steepens beyond any fixed power law and "
            "the fitted slope is a local tangent",
        ],
    )


def _t_arcsine(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_coupled_time(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    n = cfg.n_steps
    age = (n - batch.scalars["last_exit"][ok]).astype(float)
    eps_grid = np.arange(0.1, 0.95, 0.1)
    devs = []
    rows = []
    for eps in eps_grid:
        p = float(np.mean(age <= eps * n))
        ref = float(arcsine_cdf(eps))
        devs.append(abs(p - ref))
        rows.append({"eps": round(float(eps), 3), "p_measured": p, "arcsine": ref})
    max_dev = float(max(devs))
    passed = max_dev <= 0.05
    return Verdict(
        target="arcsine",
        claim=(
            "the age n - rho_{N_n} of the excursion in progress at time n, "
            "normalized by n, follows the arcsine law with distribution "
            "function (2/pi) asin(sqrt(eps))"
        ),
        passed=passed,
        headline=f"max ECDF deviation {max_dev:.4f} vs arcsine law (<= 0.05: {passed})",
        measured={"max_abs_deviation": max_dev, "grid": rows},
        expected={"law": "(2/pi) asin(sqrt(eps))"},
        tolerance="max over eps in {0.1..0.9} of |ECDF - arcsine CDF| <= 0.05",
        provenance="closed-form limit law vs Monte Carlo ECDF",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_commitment(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_commitment(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    n = cfg.n_steps
    commit = np.minimum(batch.scalars["last_h"][ok], batch.scalars["last_v"][ok]).astype(float)
    commit = commit[:1_000]  # the claim's stated power; the batch is larger for reuse
    threshold = float(n) ** 0.9
    frac = float(np.mean(commit <= threshold))
    passed = frac >= 0.95
    return Verdict(
        target="commitment",
        claim=(
            "the walk commits to one axis: the last time it touches the axis "
            "it eventually abandons is at most n^0.9 with probability at "
            "least 0.95 by time n = 1e6"
        ),
        passed=passed,
        headline=f"committed fraction {frac:.4f} by n^0.9 = {threshold:.0f} (>= 0.95: {passed})",
        measured={
            "fraction_committed": frac,
            "median_commitment_time": float(np.median(commit)),
            "p90_commitment_time": float(np.quantile(commit, 0.9)),
        },
        expected={"fraction_committed": ">= 0.95"},
        tolerance="fraction with last abandoned-axis visit <= n^0.9 must reach 0.95",
        provenance="Monte Carlo fraction; threshold calibrated to the finite-time claim",
        config={**_cfg_summary(cfg), "replicas_used": int(len(commit))},
        notes=notes,
    )


def _t_coupling_ks(session, replicas=None, seed=None) -> Verdict:
    # independent seeds on the two sides; a seed override shifts both but
    # keeps them distinct so the samples stay uncorrelated
    cfg_z = _apply(_batch_commitment(), replicas, None if seed is None else seed + 1)
    cfg_c = _apply(_batch_coupled_commitment(), replicas, seed)
    batch_z = session.batch(cfg_z)
    batch_c = session.batch(cfg_c)
    notes: List[str] = []
    ok_z = _ok(batch_z, notes)
    ok_c = _ok(batch_c, notes)
    m = cfg_c.replicas
    z_side = batch_z.scalars["z_final"][ok_z][:m].astype(float)
    c_side = batch_c.scalars["z_final"][ok_c].astype(float)
    ks = ks_distance(z_side, c_side)
    passed = ks <= 0.05
    return Verdict(
        target="coupling-ks",
        claim=(
            "after axis commitment the quarter-plane walk and its half-plane "
            "coupling share the same dominant-coordinate law: the KS distance "
            "between their Zbar_n samples at n = 1e6 is small"
        ),
        passed=passed,
        headline=f"KS distance {ks:.4f} between coupled laws (<= 0.05: {passed})",
        measured={"ks_distance": ks, "n_quarter": len(z_side), "n_coupled": len(c_side)},
        expected={"ks_distance": "<= 0.05"},
        tolerance="two-sample KS distance <= 0.05 at 1e4 samples per side",
        provenance="Monte Carlo two-sample comparison (coupling argument, no closed form)",
        config={"quarter": _cfg_summary(cfg_z), "coupled": _cfg_summary(cfg_c)},
        notes=notes,
    )


def _t_variance_scaling(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_excursion_growth(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    sizes = list(cfg.checkpoints)
    samples = [batch.cp_gain[ok, j] for j in range(len(sizes))]
    fit = variance_scaling(sizes, samples)
    bound = (2.0 * cfg.alpha + 2.0) / (1.0 - cfg.alpha)
    passed = fit.slope < bound - 2.0 * fit.stderr
    return Verdict(
        target="variance-scaling",
        claim=(
            "the variance of the accumulated on-axis gains "
            "sum_{j<=i} (Zbar at rho_j - Zbar at eta_j) grows strictly slower "
            "than i^((2 alpha + 2)/(1 - alpha))"
        ),
        passed=passed,
        headline=(
            f"variance exponent {fit.slope:.3f} vs bound {bound:.3f} "
            f"(below by > 2 stderr = {2 * fit.stderr:.3f}: {passed})"
        ),
        measured={
            "slope": fit.slope,
            "slope_stderr": fit.stderr,
            "variances": {int(s): float(np.var(v, ddof=1)) for s, v in zip(sizes, samples)},
        },
        expected={"strict_upper_bound": bound},
        tolerance="fitted exponent < (2 alpha + 2)/(1 - alpha) - 2 stderr",
        provenance="Monte Carlo variances over i in {1e2, 1e3, 1e4}; bound is closed form",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_ballistic(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(
        ExperimentConfig(
            model="quarter-plane", alpha=1.5, n_steps=1_000_000, replicas=100, seed=606
        ),
        replicas,
        seed,
    )
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    n = cfg.n_steps
    ratio = float(np.mean(batch.scalars["z_final"][ok]) / n)
    axis_frac = float(np.mean(batch.scalars["axis_steps"][ok]) / n)
    try:
        rho_mean_exact(1_000, 1.0)
        divergence_signal = False
        div_msg = "no divergence raised"
    except DivergentSeriesError as exc:
        divergence_signal = True
        div_msg = str(exc)
    passed = ratio >= 0.9 and divergence_signal
    return Verdict(
        target="ballistic",
        claim=(
            "for alpha >= 1 the walk is ballistic along an axis: Zbar_n / n "
            "tends to 1, and the exact mean-exit-height series diverges "
            "(the one-excursion mean is infinite)"
        ),
        passed=passed,
        headline=(
            f"mean Zbar_n/n = {ratio:.4f} (>= 0.9) and divergence signal at "
            f"alpha=1.0: {divergence_signal}"
        ),
        measured={
            "mean_ratio": ratio,
            "axis_time_fraction": axis_frac,
            "divergence_signal": divergence_signal,
            "divergence_message": div_msg,
        },
        expected={"mean_ratio": ">= 0.9", "series": "provably divergent at alpha = 1"},
        tolerance="mean Zbar_n/n >= 0.9 at n = 1e6 (finite-n band below the limit 1)",
        provenance="Monte Carlo mean; divergence from the exact series analyzer",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_quadrant_commit(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(
        ExperimentConfig(
            model="full-plane", alpha=0.2, n_steps=1_000_000, replicas=1_000, seed=707
        ),
        replicas,
        seed,
    )
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    late = batch.scalars["quad_changes_late"][ok]
    frac = float(np.mean(late == 0))
    passed = frac >= 0.9
    return Verdict(
        target="quadrant-commit",
        claim=(
            "the full-plane walk settles around one half-axis: at least 90% of "
            "runs make zero dominant-axis sign changes during the second half "
            "of a 1e6-step trajectory"
        ),
        passed=passed,
        headline=f"fraction with zero late sign changes {frac:.4f} (>= 0.9: {passed})",
        measured={
            "fraction_zero_late_changes": frac,
            "mean_total_changes": float(np.mean(batch.scalars["quad_changes"][ok])),
        },
        expected={"fraction_zero_late_changes": ">= 0.9"},
        tolerance="fraction of replicas with zero second-half sign changes >= 0.9",
        provenance="Monte Carlo fraction (qualitative settling claim, calibrated threshold)",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_subordinator_marginal(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_coupled_excursions(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    i = cfg.excursions
    normalized = batch.scalars["t"][ok].astype(float) / float(i) ** 2
    oracle = session.oracle(_ORACLE_INDEX, _ORACLE_REPLICAS, _ORACLE_SEED)
    ks = ks_distance(normalized, oracle.samples)
    passed = ks <= 0.05
    return Verdict(
        target="subordinator-marginal",
        claim=(
            "the time of the i-th excursion exit, normalized by i^2, has the "
            "law of a sum of i independent interior return times in the same "
            "normalization (one marginal of the half-stable subordinator limit)"
        ),
        passed=passed,
        headline=f"KS distance {ks:.4f} to the exact-renewal oracle (<= 0.05: {passed})",
        measured={
            "ks_distance": ks,
            "median_normalized_time": float(np.median(normalized)),
            "samples": int(len(normalized)),
        },
        expected={
            "oracle_median": float(np.median(oracle.samples)),
            "oracle_replicas": oracle.replicas,
            "oracle_truncation": oracle.truncation,
            "oracle_tail_mass": oracle.tail_mass,
        },
        tolerance="two-sample KS distance <= 0.05 (1e4 walk samples vs 5e4 oracle samples)",
        provenance="oracle sampled from the exact interior-return-time law (DP-verified)",
        config=_cfg_summary(cfg),
        notes=notes
        + [
            "on-axis waiting times add a relative O(1/i) shift to the walk "
            "times; at i = 1e3 this is far below the KS tolerance"
        ],
    )


def _t_submartingale(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_excursion_growth(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    dyadic = [2**j for j in range(14)]  # 1 .. 8192 <= 1e4
    means = [float(np.mean(batch.z_exit[ok, i - 1])) for i in dyadic]
    increasing = all(b > a for a, b in zip(means, means[1:]))
    min_final = float(np.min(batch.z_exit[ok, cfg.excursions - 1]))
    diverged = min_final >= 100.0
    passed = increasing and diverged
    return Verdict(
        target="submartingale",
        claim=(
            "the exit-height sequence (Zbar at rho_i) is a submartingale that "
            "diverges: its mean is strictly increasing along i and every "
            "replica ends far from the origin"
        ),
        passed=passed,
        headline=(
            f"dyadic means strictly increasing: {increasing}; "
            f"min final exit height {min_final:.0f} (>= 100: {diverged})"
        ),
        measured={
            "dyadic_indices": dyadic,
            "dyadic_means": means,
            "min_final_exit_height": min_final,
        },
        expected={"dyadic_means": "strictly increasing", "min_final": ">= 100"},
        tolerance="strict increase across dyadic indices (no slack); divergence floor 100",
        provenance="Monte Carlo means; submartingale property holds exactly in law",
        config=_cfg_summary(cfg),
        notes=notes,
    )


def _t_eta_moment(session, replicas=None, seed=None) -> Verdict:
    x_grid = (300, 1_000, 3_000)
    rows = []
    all_ok = True
    notes: List[str] = []
    for x in x_grid:
        cfg = _apply(
            ExperimentConfig(
                model="quarter-plane",
                alpha=0.25,
                excursions=1,
                replicas=120_000,
                seed=808,
                start=(x, 1),
                # vertical entries arrive on the x^2 time scale, so the cap
                # must sit well above it or it censors exactly the
                # trajectories the estimator needs
                time_cap=max(1_000_000, 40 * x * x),
            ),
            replicas,
            seed,
        )
        batch = session.batch(cfg)
        ok = _ok(batch, notes)
        # entry height is start height + accumulated approach increment; on a
        # vertical-axis entry the horizontal coordinate is 0, so the positive
        # part (Y_eta - X_eta)^+ equals the entry height itself
        z_entry = (x + batch.scalars["sum_cone"][ok]).astype(float)
        vertical = batch.scalars["y"][ok] > batch.scalars["x"][ok]
        contrib = np.where(vertical, z_entry, 0.0)
        c3_hat = float(np.mean(contrib))
        se = float(np.std(contrib, ddof=1) / math.sqrt(len(contrib)))
        raw = float(np.mean(batch.scalars["sum_cone"][ok]))
        ok_here = (c3_hat > 2.0 * se) and (c3_hat < 10.0)
        all_ok &= ok_here
        rows.append(
            {
                "x": x,
                "c3_estimate": c3_hat,
                "se": se,
                "vertical_entry_fraction": float(np.mean(vertical)),
                "raw_mean_entry_minus_x": raw,
                "ok": ok_here,
            }
        )
    return Verdict(
        target="eta-moment",
        claim=(
            "from a start (x, 1) just off the axis, the mean entry height of "
            "the first excursion exceeds x by a positive constant c3 + O(x^(-1/2)): "
            "c3 equals the mean height collected on the rare vertical-axis "
            "entries, since the horizontal coordinate is a martingale until entry"
        ),
        passed=all_ok,
        headline=(
            "c3 estimates "
            + ", ".join(f"x={r['x']}: {r['c3_estimate']:.3f} (se {r['se']:.3f})" for r in rows)
            + f" all positive at 2 se and < 10: {all_ok}"
        ),
        measured={"grid": rows},
        expected={"c3": "> 0 (value model-dependent), bounded by 10"},
        tolerance="each estimate > 2 se above 0 and below 10 across x in {300, 1e3, 3e3}",
        provenance=(
            "Monte Carlo positive-part estimator (variance-reduced via the "
            "martingale identity E(X at eta) = x)"
        ),
        config={"x_grid": list(x_grid), "alpha": 0.25, "replicas": 120_000, "seed": 808},
        notes=notes,
    )


def _t_theorem_right_tail(session, replicas=None, seed=None) -> Verdict:
    cfg = _apply(_batch_quarter_time(), replicas, seed)
    batch = session.batch(cfg)
    notes: List[str] = []
    ok = _ok(batch, notes)
    z = batch.scalars["z_final"][ok].astype(float)
    n = cfg.n_steps
    c = constants(cfg.alpha)
    scale = float(n) ** c.time_exponent
    oracle = session.oracle(_ORACLE_INDEX, _ORACLE_REPLICAS, _ORACLE_SEED)
    a_grid = (2.0, 2.5, 3.0)
    rows = []
    ratios = []
    for a in a_grid:
        p = float(np.mean(z > a * scale))
        pred = theorem_right_tail_expected(cfg.alpha, a, oracle)
        ratio = p / pred if pred > 0 else math.inf
        ratios.append(ratio)
        rows.append({"a": a, "p_measured": p, "p_renewal_oracle": pred, "ratio": ratio})
    mean_ratio = float(np.mean(ratios))
    passed = 0.8 <= mean_ratio <= 1.2
    return Verdict(
        target="theorem-right-tail",
        claim=(
            "the upper tail P(Zbar_n > a n^(1/(2(1-alpha)))) matches the "
            "renewal picture: the event is equivalent to the normalized "
            "excursion clock V falling below (c1/a)^(2(1-alpha)), whose "
            "probability the exact-renewal oracle supplies"
        ),
        passed=passed,
        headline=f"mean measured/predicted ratio {mean_ratio:.3f} over a in {a_grid} (in [0.8, 1.2]: {passed})",
        measured={"grid": rows, "mean_ratio": mean_ratio},
        expected={"mean_ratio": 1.0},
        tolerance=(
            "mean of measured/predicted over a in {2.0, 2.5, 3.0} within "
            "[0.8, 1.2] (finite-n last-excursion corrections allowed)"
        ),
        provenance="oracle CDF from the exact interior-return-time law",
        config=_cfg_summary(cfg),
        notes=notes,
    )


@dataclass(frozen=True)
class TargetSpec:
    """Registry entry: claim metadata plus the callable that runs it."""

    name: str
    summary: str
    min_replicas: int
    runtime_hint: str
    fn: Callable


TARGETS: Dict[str, TargetSpec] = {
    spec.name: spec
    for spec in [
        TargetSpec(
            "mean-asymptotic",
            "exact one-excursion mean exit height vs its stated expansion",
            0,
            "< 1 s (pure analytics)",
            _t_mean_asymptotic,
        ),
        TargetSpec(
            "lln",
            "law of large numbers for the excursion-indexed exit height",
            200,
            "~1 min",
            _t_lln,
        ),
        TargetSpec(
            "recurrence-sandwich",
            "mean exit height residuals confined to a unit band",
            200,
            "~1 min (shares the lln batch)",
            _t_recurrence_sandwich,
        ),
        TargetSpec(
            "nn-left-tail",
            "left tail exponent of the excursion count by time n",
            2_000,
            "~1 min",
            _t_nn_left_tail,
        ),
        TargetSpec(
            "theorem-left-tail",
            "lower tail exponent of the dominant coordinate at time n",
            20_000,
            "~1-2 min",
            _t_theorem_left_tail,
        ),
        TargetSpec(
            "arcsine",
            "arcsine law for the age of the excursion in progress",
            1_000,
            "~1 min (shares the nn-left-tail batch)",
            _t_arcsine,
        ),
        TargetSpec(
            "commitment",
            "axis commitment before n^0.9",
            200,
            "~1 min (shares the coupling batch)",
            _t_commitment,
        ),
        TargetSpec(
            "coupling-ks",
            "KS agreement between the quarter-plane walk and its coupling",
            2_000,
            "~2 min (two long-horizon batches)",
            _t_coupling_ks,
        ),
        TargetSpec(
            "variance-scaling",
            "growth exponent of the accumulated-gain variance",
            200,
            "~1 min (shares the lln batch)",
            _t_variance_scaling,
        ),
        TargetSpec(
            "ballistic",
            "linear escape at alpha = 1.5 plus series divergence at alpha = 1",
            50,
            "~5 s",
            _t_ballistic,
        ),
        TargetSpec(
            "quadrant-commit",
            "full-plane walks stop switching half-axes in the second half",
            200,
            "~1 min",
            _t_quadrant_commit,
        ),
        TargetSpec(
            "subordinator-marginal",
            "normalized excursion clock vs the exact renewal oracle",
            1_000,
            "~30 s",
            _t_subordinator_marginal,
        ),
        TargetSpec(
            "submartingale",
            "monotone divergence of the exit-height sequence",
            200,
            "~1 min (shares the lln batch)",
            _t_submartingale,
        ),
        TargetSpec(
            "eta-moment",
            "positive bounded entry-height bias from starts beside the axis",
            20_000,
            "~2-3 min",
            _t_eta_moment,
        ),
        TargetSpec(
            "theorem-right-tail",
            "upper tail of the dominant coordinate vs the renewal oracle",
            20_000,
            "~1-2 min (shares batches)",
            _t_theorem_right_tail,
        ),
    ]
}


def list_targets() -> List[TargetSpec]:
    return list(TARGETS.values())


def run_target(
    name: str,
    session: Optional[VerifySession] = None,
    replicas: Optional[int] = None,
    seed: Optional[int] = None,
) -> Verdict:
    """Run one registered target and return its verdict.

    Raises :class:`UsageError` for unknown names or replica counts below
    the target's statistical floor.
    """
    if name not in TARGETS:
        known = ", ".join(sorted(TARGETS))
        raise UsageError(f"unknown verification target {name!r}; known targets: {known}")
    spec = TARGETS[name]
    if replicas is not None and replicas < spec.min_replicas:
        raise UsageError(
            f"target {name!r} needs at least {spec.min_replicas} replicas for "
            f"its tolerance; got {replicas}"
        )
    if session is None:
        session = VerifySession()
    return spec.fn(session, replicas=replicas, seed=seed)
