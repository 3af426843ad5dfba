"""Asymptotic and alpha-density estimates for subsets of N given by monotone maps.

Every estimate is a *windowed limit estimate*: the ratio of interest is sampled
on log-spaced points of the trailing window ``[horizon/span, horizon]``, the
window is cut into blocks, and each block reports a local limit guess from its
log-log trend (clearly decaying power law -> 0, clearly growing -> infinity,
otherwise the block mean). The estimate is finite when all block guesses agree
to within the tolerance, infinite when every block grows, and undetermined
otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .seqmap import Complement, MonotoneMap, compose

SetLike = Union[MonotoneMap, Complement]

FINITE, INFINITE, UNDETERMINED = "finite", "infinite", "undetermined"
DENSE, NOT_DENSE, UNDECIDED = "delta_alpha_dense", "not_dense_within_budget", "undetermined"


@dataclass(frozen=True)
class EstimatorConfig:
    window: Optional[int] = None  # sample count; default max(1000, horizon // 100)
    span: int = 100  # window covers [horizon / span, horizon]
    blocks: int = 10
    slope_tol: float = 0.05  # |log-log slope| below this counts as "flat"
    blowup: float = 1.0  # an infinite verdict needs the last ratio above this


DEFAULT_CONFIG = EstimatorConfig()


@dataclass(frozen=True)
class DensityEstimate:
    kind: str
    value: Optional[float]
    horizon: int
    window_spread: float
    tolerance: float
    last_ratio: float = math.nan
    slope: float = math.nan

    def to_json(self) -> dict:
        out = {"kind": self.kind, "spread": _jsonable(self.window_spread),
               "last_ratio": _jsonable(self.last_ratio), "slope": _jsonable(self.slope),
               "horizon": self.horizon, "tolerance": self.tolerance}
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass(frozen=True)
class DensityVerdict:
    claim: str
    alpha: float
    evidence: DensityEstimate

    @property
    def dense(self) -> bool:
        return self.claim == DENSE


def _jsonable(x: float):
    if x is None or math.isnan(x):
        return None
    if math.isinf(x):
        return "inf"
    return round(float(x), 12)


def _check_alpha(alpha: float):
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def sample_grid(horizon: int, config: EstimatorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Log-spaced integer sample points of the trailing window."""
    w = config.window or max(1000, horizon // 100)
    if horizon < w:
        raise ValueError(f"horizon {horizon} is smaller than the window size {w}")
    lo = max(1, horizon // config.span)
    return np.unique(np.geomspace(lo, horizon, w).round().astype(np.int64))


def _slope(ns: np.ndarray, rs: np.ndarray) -> float:
    pos = rs > 0
    if pos.sum() < max(2, rs.size // 2):
        return math.nan
    x, y = np.log(ns[pos].astype(float)), np.log(rs[pos])
    if np.ptp(x) == 0:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def estimate_limit(ns: np.ndarray, ratios: np.ndarray, horizon: int, tolerance: float,
                   config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    """Classify the limit of a sampled ratio sequence (see module docstring)."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    ratios = np.asarray(ratios, dtype=float)
    slope = _slope(ns, ratios)
    last = float(ratios[-1])
    guesses, means = [], []
    for bn, br in zip(np.array_split(ns, config.blocks), np.array_split(ratios, config.blocks)):
        if br.size == 0:
            continue
        means.append(float(br.mean()))
        if not np.any(br > 0):
            guesses.append(0.0)
            continue
        s = _slope(bn, br)
        if not math.isnan(s) and s <= -config.slope_tol:
            guesses.append(0.0)
        elif not math.isnan(s) and s >= config.slope_tol:
            guesses.append(math.inf)
        else:
            guesses.append(float(br.mean()))
    g = np.asarray(guesses)
    if np.all(np.isinf(g)):
        growing = bool(np.all(np.diff(means) >= 0)) and last > config.blowup
        kind = INFINITE if growing else UNDETERMINED
        return DensityEstimate(kind, None, horizon, math.inf, tolerance, last, slope)
    if np.any(np.isinf(g)):
        return DensityEstimate(UNDETERMINED, None, horizon, math.inf, tolerance, last, slope)
    spread = float(np.ptp(g))
    if spread <= tolerance:
        return DensityEstimate(FINITE, float(g[-1]), horizon, spread, tolerance, last, slope)
    return DensityEstimate(UNDETERMINED, None, horizon, spread, tolerance, last, slope)


# ------------------------------------------------------------------ set counts


def counting_function(A: SetLike, ns: np.ndarray, horizon: int) -> np.ndarray:
    """``#(A ∩ [1, n])`` for each sample point ``n``."""
    if isinstance(A, Complement):
        rng = A.of.range_upto(horizon)
        return ns - np.searchsorted(rng, ns, side="right")
    return np.searchsorted(A.range_upto(horizon), ns, side="right")


def ratio_table(A: SetLike, alpha: float, horizon: int,
                config: EstimatorConfig = DEFAULT_CONFIG) -> tuple[np.ndarray, np.ndarray]:
    """Sample points and ``#(A ∩ [1,n]) / n**alpha`` at each."""
    _check_alpha(alpha)
    ns = sample_grid(horizon, config)
    counts = counting_function(A, ns, horizon)
    return ns, counts / ns.astype(float) ** alpha


def estimate_delta_alpha(A: SetLike, alpha: float, horizon: int, tolerance: float = 0.05,
                         config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    """Windowed estimate of ``lim #(A ∩ [1,n]) / n**alpha``."""
    ns, rs = ratio_table(A, alpha, horizon, config)
    return estimate_limit(ns, rs, horizon, tolerance, config)


def estimate_delta(A: SetLike, horizon: int, tolerance: float = 0.05,
                   config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    return estimate_delta_alpha(A, 1.0, horizon, tolerance, config)


def estimate_indicator_density(mask: np.ndarray, alpha: float, tolerance: float = 0.05,
                               config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    """Estimate for the set ``{n : mask[n-1]}`` over the horizon ``len(mask)``."""
    _check_alpha(alpha)
    horizon = len(mask)
    ns = sample_grid(horizon, config)
    cum = np.cumsum(np.asarray(mask, dtype=np.int64))
    rs = cum[ns - 1] / ns.astype(float) ** alpha
    return estimate_limit(ns, rs, horizon, tolerance, config)


def _float_values(phi: MonotoneMap, ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = phi.values_at(ns)
    if v.dtype == object:
        gap = np.asarray([float(int(a) - int(n)) for a, n in zip(v, ns)])
        return np.asarray([float(a) for a in v]), gap
    return v.astype(float), (v - ns).astype(float)


def delta_of_map(phi: MonotoneMap, horizon: int, tolerance: float = 0.05,
                 config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    """Estimate ``lim n / phi(n)``."""
    ns = sample_grid(horizon, config)
    vals, _ = _float_values(phi, ns)
    return estimate_limit(ns, ns / vals, horizon, tolerance, config)


def delta_alpha_complement(phi: MonotoneMap, alpha: float, horizon: int, tolerance: float = 0.05,
                           config: EstimatorConfig = DEFAULT_CONFIG) -> DensityEstimate:
    """Estimate ``lim (phi(n) - n) / phi(n)**alpha``, the alpha-density of ``C_phi``."""
    _check_alpha(alpha)
    ns = sample_grid(horizon, config)
    vals, gaps = _float_values(phi, ns)
    return estimate_limit(ns, gaps / vals**alpha, horizon, tolerance, config)


def is_delta_alpha_dense(phi: MonotoneMap, alpha: float, horizon: int, tolerance: float = 0.05,
                         config: EstimatorConfig = DEFAULT_CONFIG) -> DensityVerdict:
    est = delta_alpha_complement(phi, alpha, horizon, tolerance, config)
    if est.kind == FINITE and est.value <= tolerance:
        claim = DENSE
    elif est.kind == INFINITE or (est.kind == FINITE and est.value > tolerance):
        claim = NOT_DENSE
    else:
        claim = UNDECIDED
    return DensityVerdict(claim, alpha, est)


# --------------------------------------------------------------- lemma harnesses


@dataclass
class InitialBoundingReport:
    alpha: float
    beta: float
    bound: float
    premise: DensityEstimate
    beta_estimate: DensityEstimate
    premise_holds: bool
    conclusion_holds: bool

    @property
    def consistent(self) -> bool:
        return (not self.premise_holds) or self.conclusion_holds


def check_initial_bounding(phi: MonotoneMap, alpha: float, beta: float, horizon: int,
                           tolerance: float = 0.05,
                           config: EstimatorConfig = DEFAULT_CONFIG) -> InitialBoundingReport:
    """If ``n / phi(n)**alpha`` stays bounded, the beta-density of range(phi) is 0."""
    if not (0 < alpha < beta <= 1):
        raise ValueError("need 0 < alpha < beta <= 1")
    ns = np.union1d(np.arange(1, min(horizon, 1000) + 1), sample_grid(horizon, config))
    vals, _ = _float_values(phi, ns)
    ratios = ns / vals**alpha
    window = ns >= max(1, horizon // config.span)
    premise = estimate_limit(ns[window], ratios[window], horizon, tolerance, config)
    beta_est = estimate_delta_alpha(phi, beta, horizon, tolerance, config)
    premise_holds = premise.kind == FINITE
    conclusion = beta_est.kind == FINITE and beta_est.value <= tolerance
    return InitialBoundingReport(alpha, beta, float(ratios.max()), premise, beta_est,
                                 premise_holds, conclusion)


@dataclass
class RatioBoundReport:
    alpha: float
    max_ratio: float
    tail_ratio: float
    tail_deviation: float  # max |ratio - 1| over the trailing 1% of indices
    trend_to_one: bool


def _require_dense(maps, alpha, horizon, tolerance, config):
    for m in maps:
        v = is_delta_alpha_dense(m, alpha, horizon, tolerance, config)
        if not v.dense:
            raise ValueError(
                f"{m.label} is not certified delta_{alpha}-dense "
                f"(claim={v.claim}, estimate={v.evidence.to_json()})")


def check_ratio_bounded(phi: MonotoneMap, psi: MonotoneMap, alpha: float, horizon: int,
                        tolerance: float = 0.05, check_preconditions: bool = True,
                        config: EstimatorConfig = DEFAULT_CONFIG) -> RatioBoundReport:
    """Sup and trend of ``phi(psi(n+1)) / phi(psi(n))`` over ``n <= horizon``."""
    if check_preconditions:
        _require_dense((phi, psi), alpha, horizon, tolerance, config)
    comp = compose(phi, psi)
    v = comp.values_at(np.arange(1, horizon + 2, dtype=np.int64))
    v = np.asarray(v, dtype=float)
    r = v[1:] / v[:-1]
    tail = r[-max(1, horizon // 100):]
    dev = float(np.max(np.abs(tail - 1.0)))
    return RatioBoundReport(alpha, float(r.max()), float(r[-1]), dev, dev <= 0.05)


@dataclass
class SubsemigroupReport:
    alpha: float
    composite_label: str
    verdict: DensityVerdict
    consistent: bool


def verify_subsemigroup(phi: MonotoneMap, psi: MonotoneMap, alpha: float, horizon: int,
                        tolerance: float = 0.05, check_preconditions: bool = True,
                        config: EstimatorConfig = DEFAULT_CONFIG) -> SubsemigroupReport:
    """Density verdict for ``phi∘psi`` given both factors are delta_alpha-dense."""
    if check_preconditions:
        _require_dense((phi, psi), alpha, horizon, tolerance, config)
    comp = compose(phi, psi)
    verdict = is_delta_alpha_dense(comp, alpha, horizon, tolerance, config)
    decreasing = verdict.claim == UNDECIDED and verdict.evidence.slope < 0
    return SubsemigroupReport(alpha, comp.label, verdict, verdict.dense or decreasing)
