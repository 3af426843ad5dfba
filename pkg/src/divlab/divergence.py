"""Divergence classes, statistical and s*-convergence, and the w/s transformers.

Sequences are 1-indexed generators (:class:`Seq`). Universal statements
(SDS, every s-class) are never certified from samples: they are refuted by an
exhibit or reported ``consistent`` within the sampling budget. Positive
divergence certificates come from a structural :class:`SeparationBound`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from . import density
from .seqmap import MonotoneMap, affine, identity, nonpowers, power, shift, skip, sparse, \
    IndexTooLarge, blockskip_square, standard_generators
from .spaces import (CERTIFIED_NO, TENTATIVELY_YES, RealLine, SpacePresentation,
                     _cofinal, _contains_many, converges_at_horizon)

CERTIFIED, REFUTED, UNDETERMINED, CONSISTENT = "certified", "refuted", "undetermined", "consistent"

EPS_GRID = tuple(2.0 ** -k for k in range(11))


# ---------------------------------------------------------------- sequences


@dataclass(frozen=True)
class Seq:
    """A sequence ``n -> term(n)`` for ``n >= 1``; ``vec`` evaluates index arrays."""

    label: str
    term: Callable[[int], Any]
    vec: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, n: int):
        return self.term(int(n))

    def prefix(self, n: int) -> list:
        if self.vec is not None:
            return list(self.values(np.arange(1, n + 1, dtype=np.int64)))
        return [self.term(i) for i in range(1, n + 1)]

    def values(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.vec is not None:
            return self.vec(idx)
        return np.asarray([self.term(int(i)) for i in idx])

    def compose(self, phi: MonotoneMap) -> "Seq":
        vec = None
        if self.vec is not None:
            def vec(idx, f=self.vec, term=self.term):
                v = phi.values_at(idx)
                if v.dtype == object:  # beyond int64: evaluate exactly, term by term
                    return np.asarray([term(int(m)) for m in v])
                return f(v.astype(np.int64))
        return Seq(f"{self.label}∘{phi.label}", lambda n: self.term(phi(n)), vec)


def constant(c, label: Optional[str] = None) -> Seq:
    return Seq(label or f"const:{c}", lambda n: c, lambda idx: np.full(idx.shape, c, dtype=float)
               if isinstance(c, (int, float)) else np.asarray([c] * len(idx)))


def naturals() -> Seq:
    """``n -> n`` (usable in discrete N and as a real sequence)."""
    return Seq("n", lambda n: n, lambda idx: idx.copy())


def reciprocals() -> Seq:
    return Seq("1/n", lambda n: 1.0 / n, lambda idx: 1.0 / idx)


def weave(s: Seq, c, label: Optional[str] = None) -> Seq:
    """``w(2n) = s(n)``, ``w(2n - 1) = c``: a constant woven into ``s``."""

    def term(n):
        return s(n // 2) if n % 2 == 0 else c

    vec = None
    if s.vec is not None and isinstance(c, (int, float)):
        def vec(idx):
            out = np.full(idx.shape, c, dtype=float)
            even = idx % 2 == 0
            if even.any():
                out[even] = s.values(idx[even] // 2)
            return out
    return Seq(label or f"weave({s.label},{c})", term, vec)


def _is_square(idx: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(idx.astype(float))).astype(np.int64)
    r += (r + 1) ** 2 <= idx
    r -= r * r > idx
    return r * r == idx


def squares_exception() -> Seq:
    """``s(n) = n`` on squares and ``1/n`` elsewhere."""

    def vec(idx):
        idx = np.asarray(idx, dtype=np.int64)
        return np.where(_is_square(idx), idx.astype(float), 1.0 / idx)

    return Seq("squares_exception", lambda n: float(vec(np.asarray([n]))[0]), vec)


def square_swap(idx: np.ndarray) -> np.ndarray:
    """The involution exchanging the k-th square with the k-th non-square.

    The k-th non-square is ``k + floor(1/2 + sqrt k)``; a non-square ``m`` has
    index ``m - isqrt(m)``.
    """
    idx = np.asarray(idx, dtype=np.int64)
    r = np.floor(np.sqrt(idx.astype(float))).astype(np.int64)
    r += (r + 1) ** 2 <= idx
    r -= r * r > idx
    sq = r * r == idx
    out = np.empty_like(idx)
    k = r[sq]
    out[sq] = k + np.floor(0.5 + np.sqrt(k.astype(float))).astype(np.int64)
    j = idx[~sq] - r[~sq]
    out[~sq] = j * j
    return out


def swapped(s: Seq) -> Seq:
    vec = None
    if s.vec is not None:
        vec = lambda idx: s.values(square_swap(idx))
    return Seq(f"{s.label}∘swap", lambda n: s(int(square_swap(np.asarray([n]))[0])), vec)


# ---------------------------------------------------------------- separation


@dataclass(frozen=True)
class SeparationBound:
    """A generator-level bound under which any sequence is strongly divergent.

    ``metric`` form: pairwise distances at least ``epsilon`` (an infinite
    uniformly separated set of reals has no Cauchy, hence no convergent,
    subsequence). ``coordinate`` form: a continuous map ``coordinate`` into a
    discrete space, injective on the sequence; the basic separating two points
    is the preimage ``basic(coordinate(p))`` of the singleton.
    """

    kind: str
    epsilon: Optional[float] = None
    coordinate: Optional[Callable[[Any], Any]] = None
    basic: Optional[Callable[[Any], Any]] = None
    label: str = ""

    @staticmethod
    def metric(epsilon: float) -> "SeparationBound":
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        return SeparationBound("metric", epsilon=float(epsilon), label=f"eps={epsilon}")

    @staticmethod
    def by_coordinate(coordinate, basic=None, label="coordinate") -> "SeparationBound":
        return SeparationBound("coordinate", coordinate=coordinate, basic=basic, label=label)

    def check(self, prefix: Sequence) -> Optional[tuple[int, int]]:
        """Offending 1-based index pair, or ``None`` when the bound holds."""
        if self.kind == "metric":
            v = np.asarray(prefix, dtype=float)
            order = np.argsort(v, kind="stable")
            gaps = np.diff(v[order])
            bad = np.flatnonzero(gaps < self.epsilon)
            if bad.size:
                i = bad[0]
                a, b = sorted((int(order[i]) + 1, int(order[i + 1]) + 1))
                return a, b
            return None
        seen: dict = {}
        for i, p in enumerate(prefix, start=1):
            c = self.coordinate(p)
            if c in seen:
                return seen[c], i
            seen[c] = i
        return None

    def to_json(self):
        return {"kind": self.kind, "epsilon": self.epsilon, "label": self.label}


def discrete_bound() -> SeparationBound:
    """Identity coordinate on discrete N; separating basics are singletons."""
    return SeparationBound.by_coordinate(lambda p: p, lambda v: ("pt", v), "singletons")


def zk_coordinate_bound(x: int) -> SeparationBound:
    """``p -> p(x)`` on Z^K; separating basics are ``[h;{x}]``."""
    return SeparationBound.by_coordinate(lambda p: p(x), lambda v: ("cyl", ((x, v),)),
                                         f"[h;{{{x}}}]")


@dataclass
class DivergenceVerdict:
    class_name: str
    claim: str
    witness: Any = None
    horizon: Optional[int] = None
    diagnostics: list = field(default_factory=list)

    def to_json(self):
        w = self.witness
        if isinstance(w, MonotoneMap):
            w = {"map": w.label}
        elif isinstance(w, SeparationBound):
            w = w.to_json()
        elif isinstance(w, dict):
            w = {k: (v.label if isinstance(v, MonotoneMap) else
                     v.to_json() if hasattr(v, "to_json") else v) for k, v in w.items()}
        return {"class": self.class_name, "claim": self.claim, "witness": w,
                "horizon": self.horizon, "diagnostics": list(self.diagnostics)}


def sds_certificate_by_separation(prefix: Sequence, bound: SeparationBound,
                                  class_name: str = "SDS") -> DivergenceVerdict:
    bad = bound.check(prefix)
    if bad is None:
        return DivergenceVerdict(class_name, CERTIFIED, bound, len(prefix))
    return DivergenceVerdict(class_name, REFUTED, {"bound": bound, "pair": list(bad)}, len(prefix),
                             [f"bound {bound.label} fails on indices {bad[0]},{bad[1]}"])


Inner = Callable[[Seq], DivergenceVerdict]


def divergence_inner(bound: SeparationBound, horizon: int, space: Optional[SpacePresentation] = None,
                     probes: Iterable = (), basis_budget: int = 11) -> Inner:
    """Strong-divergence predicate on sequences.

    Certified when ``bound`` holds on the horizon prefix. Refuted by a
    convergent-subsequence exhibit: a value repeated cofinally (constant
    subsequence) or, when ``space`` is given, a probe the prefix tentatively
    converges to. Otherwise undetermined, with the bound failure recorded.
    """
    probes = list(probes)

    def inner(s: Seq) -> DivergenceVerdict:
        pre = s.prefix(horizon)
        v = sds_certificate_by_separation(pre, bound)
        if v.claim == CERTIFIED:
            return v
        diag = list(v.diagnostics)
        exhibit = _constant_exhibit(pre)
        if exhibit is not None:
            return DivergenceVerdict("SDS", REFUTED, {"constant_subsequence": exhibit}, horizon, diag)
        if space is not None:
            for x in probes:
                if converges_at_horizon(pre, x, space, basis_budget) == TENTATIVELY_YES:
                    return DivergenceVerdict("SDS", REFUTED, {"converges_to": space.encode(x)},
                                             horizon, diag)
        return DivergenceVerdict("SDS", UNDETERMINED, None, horizon, diag)

    return inner


def _constant_exhibit(prefix: Sequence):
    """A value whose occurrences are cofinal in the prefix, if any."""
    n = len(prefix)
    pos: dict = {}
    for i, p in enumerate(prefix):
        try:
            pos.setdefault(p, []).append(i)
        except TypeError:
            return None
    for value, idx in pos.items():
        if len(idx) > 1 and _cofinal(np.asarray(idx), idx[0], n):
            return value.item() if isinstance(value, np.generic) else value
    return None


# ---------------------------------------------------------------- w/s transformers


def family_sampler(family: str = "S", alpha: float = 1.0, horizon: int = 100_000,
                   tolerance: float = 0.05) -> Iterator[MonotoneMap]:
    """Deterministic enumeration of maps; identity first.

    ``S`` is every catalog map; ``D_alpha`` keeps maps whose complement gets a
    delta_alpha_dense verdict at ``horizon``; ``C`` keeps cofinite shifts.
    """
    def catalog():
        yield identity()
        yield from standard_generators().values()
        for k in itertools.count(2):
            yield affine(k, 0)
            yield affine(k, 1 - k)
            yield shift(k)
            yield sparse(k, k - 1)
            if k <= 6:
                yield power(k)
                yield nonpowers(k)

    seen = set()
    for phi in catalog():
        if phi.label in seen:
            continue
        seen.add(phi.label)
        if family == "S":
            yield phi
        elif family == "D_alpha":
            if density.is_delta_alpha_dense(phi, alpha, horizon, tolerance).dense:
                yield phi
        elif family == "C":
            if phi.label.startswith(("affine:1,", "shift", "cofinite")):
                yield phi
        else:
            raise ValueError(f"unknown family {family!r}")


def in_w_class(s: Seq, family_sampler: Iterable[MonotoneMap], inner: Inner, budget: int = 100,
               class_name: str = "wSD") -> DivergenceVerdict:
    """Certified once some sampled ``phi`` gives an inner-certified ``s∘phi``."""
    diags = []
    for phi in itertools.islice(family_sampler, budget):
        try:
            v = inner(s.compose(phi))
        except IndexTooLarge as exc:
            diags.append(f"{phi.label}: skipped ({exc})")
            continue
        if v.claim == CERTIFIED:
            return DivergenceVerdict(class_name, CERTIFIED, {"map": phi, "inner": v.witness},
                                     v.horizon, diags)
        diags.append(f"{phi.label}: {v.claim}")
    return DivergenceVerdict(class_name, UNDETERMINED, None, None, diags)


def in_s_class(s: Seq, family_sampler: Iterable[MonotoneMap], inner: Inner, budget: int = 100,
               class_name: str = "SDS_S") -> DivergenceVerdict:
    """Refuted by an inner-refuted ``s∘phi``; otherwise consistent within budget."""
    tried = 0
    for phi in itertools.islice(family_sampler, budget):
        try:
            v = inner(s.compose(phi))
        except IndexTooLarge:
            continue
        tried += 1
        if v.claim == REFUTED:
            return DivergenceVerdict(class_name, REFUTED, {"map": phi, "inner": v.witness},
                                     v.horizon, v.diagnostics)
    return DivergenceVerdict(class_name, CONSISTENT, None, None, [f"{tried} maps sampled"])


# ---------------------------------------------------------------- statistical convergence


@dataclass
class StatisticalVerdict:
    claim: str  # tentatively_yes / certified_no / undetermined
    alpha: float
    horizon: int
    estimates: dict  # epsilon -> DensityEstimate
    exception_fractions: dict  # epsilon -> #exceptions / horizon**alpha

    def to_json(self):
        return {"claim": self.claim, "alpha": self.alpha, "horizon": self.horizon,
                "per_epsilon": [{"epsilon": e, "estimate": est.to_json(),
                                 "fraction": self.exception_fractions[e]}
                                for e, est in self.estimates.items()]}


def statistically_converges(s: Seq, x: float, alpha: float, horizon: int,
                            tolerance: float = 0.05, grid: Sequence[float] = EPS_GRID,
                            config: density.EstimatorConfig = density.DEFAULT_CONFIG) -> StatisticalVerdict:
    """(alpha-)density of ``{n : |s_n - x| >= eps}`` for each ``eps`` in the grid."""
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    vals = np.asarray(s.values(np.arange(1, horizon + 1, dtype=np.int64)), dtype=float)
    dist = np.abs(vals - x)
    ests, fracs = {}, {}
    for eps in grid:
        mask = dist >= eps
        ests[eps] = density.estimate_indicator_density(mask, alpha, tolerance, config)
        fracs[eps] = float(mask.sum()) / horizon ** alpha
    kinds = list(ests.values())
    if all(e.kind == density.FINITE and e.value <= tolerance for e in kinds):
        claim = TENTATIVELY_YES
    elif any(e.kind == density.INFINITE or (e.kind == density.FINITE and e.value > tolerance)
             for e in kinds):
        claim = CERTIFIED_NO
    else:
        claim = UNDETERMINED
    return StatisticalVerdict(claim, alpha, horizon, ests, fracs)


@dataclass
class SStarVerdict:
    claim: str
    witness: Optional[MonotoneMap]
    tried: list

    def to_json(self):
        return {"claim": self.claim, "witness": self.witness.label if self.witness else None,
                "tried": self.tried}


def s_star_converges_search(s: Seq, x: float, alpha: float, candidate_maps: Iterable[MonotoneMap],
                            horizon: int = 10_000, tolerance: float = 0.05, budget: int = 100,
                            basis_budget: int = 11, density_horizon: int = 100_000) -> SStarVerdict:
    """Search for ``phi`` with a delta_alpha_dense verdict such that ``s∘phi -> x``."""
    line = RealLine()
    tried = []
    for phi in itertools.islice(candidate_maps, budget):
        dense = density.is_delta_alpha_dense(phi, alpha, density_horizon, tolerance)
        if not dense.dense:
            tried.append({"map": phi.label, "skipped": dense.claim})
            continue
        pre = np.asarray(s.compose(phi).values(np.arange(1, horizon + 1, dtype=np.int64)), dtype=float)
        verdict = converges_at_horizon(pre, x, line, basis_budget)
        tried.append({"map": phi.label, "convergence": verdict})
        if verdict == TENTATIVELY_YES:
            return SStarVerdict(TENTATIVELY_YES, phi, tried)
    return SStarVerdict(UNDETERMINED, None, tried)


# ---------------------------------------------------------------- SDS^C characterization


@dataclass
class LocallyFiniteReport:
    finite_to_one: bool
    repeated_value: Any
    locally_finite: bool
    failing_probe: Any
    probe_basics: dict  # encoded probe -> separating basic key (or None)

    @property
    def in_sds_C(self) -> bool:
        return self.finite_to_one and self.locally_finite

    def to_json(self):
        return {"finite_to_one": self.finite_to_one, "locally_finite": self.locally_finite,
                "in_SDS_C": self.in_sds_C, "repeated_value": self.repeated_value,
                "failing_probe": self.failing_probe}


def sds_C_characterization(prefix: Sequence, space: SpacePresentation, budget: int = 32,
                           probes: Iterable = ()) -> LocallyFiniteReport:
    """Finite-to-one plus local finiteness, read at the horizon ``len(prefix)``.

    A value recurring cofinally breaks finite-to-one; a probe all of whose first
    ``budget`` neighborhoods are met cofinally breaks local finiteness. Probes are
    the caller's plus the distinct prefix values.
    """
    n = len(prefix)
    rep = _constant_exhibit(prefix)
    pts = list(dict.fromkeys(list(probes) + [p for p in prefix]))
    basics, failing = {}, None
    for x in pts:
        witness = None
        for key in itertools.islice(space.neighborhoods(x), budget):
            inside = _contains_many(space, key, prefix)
            hits = np.flatnonzero(inside)
            if hits.size == 0 or not _cofinal(hits, -1, n):
                witness = key
                break
        basics[repr(space.encode(x))] = witness
        if witness is None and failing is None:
            failing = space.encode(x)
    return LocallyFiniteReport(rep is None, rep, failing is None, failing, basics)
