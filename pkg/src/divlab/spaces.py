"""Countable spaces presented by a membership oracle on an enumerated basis.

A presentation exposes basis *keys* (hashable, JSON-friendly tuples) with a
decidable ``contains(key, x)``, a deterministic per-point neighborhood
enumeration, an enumeration of the whole universe and of each basic open.
Everything downstream (CD certificates, convergence checks, games) only talks
to that interface.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .seqmap import MonotoneMap

Key = tuple


class SpacePresentation:
    name = "abstract"
    is_T1 = True
    discrete = False
    finite = False

    def is_point(self, x) -> bool:
        raise NotImplementedError

    def contains(self, key: Key, x) -> bool:
        raise NotImplementedError

    def neighborhoods(self, x) -> Iterator[Key]:
        """Basis keys of basics containing ``x`` in the fixed presentation order."""
        raise NotImplementedError

    def points(self) -> Iterator:
        raise NotImplementedError

    def members(self, key: Key) -> Iterator:
        """Points of a basic open, in a fixed order (may be infinite)."""
        raise NotImplementedError

    def whole(self) -> Key:
        return ("all",)

    def encode(self, x) -> Any:
        return x

    def encode_key(self, key: Key) -> Any:
        return [self.encode(k) if not isinstance(k, str) else k for k in key]

    def require_point(self, x):
        if not self.is_point(x):
            raise ValueError(f"{x!r} is not a point of {self.name}")

    def basic(self, key: Key) -> "BasicOpen":
        return BasicOpen(self, key)

    def intersect(self, a: Key, b: Key) -> Optional[Key]:
        """Basis key for ``a ∩ b`` (``None`` when empty), where the basis is closed
        under intersection."""
        if a[0] == "all":
            return b
        if b[0] == "all":
            return a
        raise NotImplementedError(f"{self.name} does not intersect basics")


# ---------------------------------------------------------------- presentations


class FiniteSpace(SpacePresentation):
    """A finite space; the default basis is every singleton plus the whole space."""

    finite = True

    def __init__(self, points: Sequence[Hashable], basis: Optional[Iterable[Iterable]] = None,
                 name: Optional[str] = None):
        self._points = list(dict.fromkeys(points))
        if not self._points:
            raise ValueError("a finite space needs at least one point")
        self._index = {p: i for i, p in enumerate(self._points)}
        if basis is None:
            sets = [frozenset([p]) for p in self._points] + [frozenset(self._points)]
        else:
            sets = [frozenset(b) for b in basis]
            stray = set().union(*sets) - set(self._points)
            if stray:
                raise ValueError(f"basis mentions unknown points {sorted(map(str, stray))}")
            sets.append(frozenset(self._points))
        self._basis: dict[Key, frozenset] = {}
        for s in sets:
            if s:
                self._basis.setdefault(self._key(s), s)
        self.name = name or "finite:{" + ",".join(map(str, self._points)) + "}"
        singles = {frozenset([p]) for p in self._points}
        self.discrete = singles <= set(self._basis.values())
        self.is_T1 = all(
            any(a in s and b not in s for s in self._basis.values())
            for a in self._points for b in self._points if a != b)

    def _key(self, s: Iterable) -> Key:
        return ("set",) + tuple(sorted(s, key=self._index.__getitem__))

    @property
    def point_list(self) -> list:
        return list(self._points)

    @property
    def basis_keys(self) -> list[Key]:
        return list(self._basis)

    def key_of(self, members: Iterable) -> Key:
        k = self._key(set(members))
        if k not in self._basis:
            raise ValueError(f"{sorted(map(str, members))} is not a basic open of {self.name}")
        return k

    def whole(self) -> Key:
        return self._key(self._points)

    def is_point(self, x) -> bool:
        try:
            return x in self._index
        except TypeError:
            return False

    def contains(self, key, x) -> bool:
        return x in self._basis[key]

    def neighborhoods(self, x):
        self.require_point(x)
        ks = [k for k, s in self._basis.items() if x in s]
        ks.sort(key=lambda k: len(self._basis[k]))
        return iter(ks)

    def points(self):
        return iter(self._points)

    def members(self, key):
        return iter(sorted(self._basis[key], key=self._index.__getitem__))

    def intersect(self, a, b):
        common = self._basis[a] & self._basis[b]
        if not common:
            return None
        k = self._key(common)
        if k not in self._basis:
            raise ValueError("basis is not closed under intersection")
        return k


class DiscreteNaturals(SpacePresentation):
    """``{0, 1, 2, ...}`` with the discrete topology; basics are singletons and the whole space."""

    name = "discreteN"
    discrete = True

    def is_point(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x >= 0

    def contains(self, key, x) -> bool:
        if key[0] == "all":
            return self.is_point(x)
        return self.is_point(x) and x == key[1]

    def neighborhoods(self, x):
        self.require_point(x)
        yield ("pt", int(x))

    def points(self):
        return itertools.count()

    def members(self, key):
        if key[0] == "all":
            return itertools.count()
        return iter([key[1]])

    def intersect(self, a, b):
        if a[0] == "all" or b[0] == "all":
            return super().intersect(a, b)
        return a if a == b else None


def _to_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Rationals(SpacePresentation):
    """The rationals; basics are open intervals with rational endpoints.

    The neighborhoods of ``x`` are ``(x - 1/k, x + 1/k)`` for ``k = 1, 2, ...``.
    """

    name = "rationals"

    def is_point(self, x) -> bool:
        if isinstance(x, bool):
            return False
        if isinstance(x, (int, Fraction, np.integer)):
            return True
        return isinstance(x, float) and np.isfinite(x)

    def interval(self, lo, hi) -> Key:
        lo, hi = _to_fraction(lo), _to_fraction(hi)
        if not lo < hi:
            raise ValueError("empty interval")
        return ("iv", lo, hi)

    def contains(self, key, x) -> bool:
        if not self.is_point(x):
            return False
        if key[0] == "all":
            return True
        q = _to_fraction(x)
        return key[1] < q < key[2]

    def neighborhoods(self, x):
        self.require_point(x)
        q = _to_fraction(x)
        for k in itertools.count(1):
            yield ("iv", q - Fraction(1, k), q + Fraction(1, k))

    def points(self):
        """0, then +-p/q in lowest terms ordered by height max(p, q)."""
        yield Fraction(0)
        for h in itertools.count(1):
            pairs = [(h, q) for q in range(1, h + 1)] + [(p, h) for p in range(1, h)]
            for p, q in pairs:
                if np.gcd(p, q) == 1:
                    yield Fraction(p, q)
                    yield Fraction(-p, q)

    def members(self, key):
        if key[0] == "all":
            return self.points()
        return self._dyadic(key[1], key[2])

    @staticmethod
    def _dyadic(lo: Fraction, hi: Fraction):
        level = [(lo, hi)]
        while True:
            nxt = []
            for a, b in level:
                m = (a + b) / 2
                yield m
                nxt += [(a, m), (m, b)]
            level = nxt

    def intersect(self, a, b):
        if a[0] == "all" or b[0] == "all":
            return super().intersect(a, b)
        lo, hi = max(a[1], b[1]), min(a[2], b[2])
        return ("iv", lo, hi) if lo < hi else None

    def encode(self, x):
        return str(_to_fraction(x))

    def encode_key(self, key):
        return ["all"] if key[0] == "all" else ["iv", str(key[1]), str(key[2])]


class RealLine(SpacePresentation):
    """Floats with the usual metric; neighborhoods ``(x - 2**-k, x + 2**-k)``, ``k = 0, 1, ...``.

    Used for real-valued sequences, where membership tests run vectorised.
    """

    name = "reals"

    def is_point(self, x) -> bool:
        return isinstance(x, (int, float, np.integer, np.floating, Fraction)) \
            and not isinstance(x, bool) and np.isfinite(float(x))

    def contains(self, key, x) -> bool:
        if key[0] == "all":
            return self.is_point(x)
        return key[1] < float(x) < key[2]

    def contains_many(self, key, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if key[0] == "all":
            return np.isfinite(xs)
        return (xs > key[1]) & (xs < key[2])

    def neighborhoods(self, x):
        self.require_point(x)
        x = float(x)
        for k in itertools.count():
            r = 2.0 ** -k
            yield ("iv", x - r, x + r)

    def points(self):
        for q in Rationals().points():
            yield float(q)

    def members(self, key):
        if key[0] == "all":
            return self.points()
        return (float(m) for m in Rationals._dyadic(Fraction(key[1]), Fraction(key[2])))


@dataclass(frozen=True)
class ZPoint:
    """A function ``Z_{>=0} -> Z`` equal to ``default`` off a finite set of coordinates."""

    default: int = 0
    exceptions: tuple = ()

    @staticmethod
    def of(values: dict, default: int = 0) -> "ZPoint":
        exc = tuple(sorted((int(k), int(v)) for k, v in values.items() if v != default))
        return ZPoint(int(default), exc)

    def __call__(self, k: int) -> int:
        for c, v in self.exceptions:
            if c == k:
                return v
        return self.default

    def updated(self, values: dict) -> "ZPoint":
        d = dict(self.exceptions)
        d.update(values)
        return ZPoint.of(d, self.default)

    def to_json(self):
        return {"default": self.default, "exceptions": [list(e) for e in self.exceptions]}


class ZProduct(SpacePresentation):
    """``Z^K`` with finite-support cylinder basics ``[f;F] = {g : g|F = f|F}``.

    Coordinates are non-negative integers allocated lazily; points are
    :class:`ZPoint` values. The neighborhoods of ``p`` alternate between the
    single-coordinate cylinder ``[p;{k}]`` and the initial-segment cylinder
    ``[p;{0..k}]``.
    """

    name = "zprod"
    is_T1 = True

    def is_point(self, x) -> bool:
        return isinstance(x, ZPoint)

    def cylinder(self, f: ZPoint, F: Iterable[int]) -> Key:
        return ("cyl", tuple((int(k), f(int(k))) for k in sorted(set(F))))

    def contains(self, key, x) -> bool:
        if not isinstance(x, ZPoint):
            return False
        if key[0] == "all":
            return True
        return all(x(k) == v for k, v in key[1])

    def neighborhoods(self, p):
        self.require_point(p)
        for k in itertools.count():
            yield self.cylinder(p, [k])
            if k > 0:
                yield self.cylinder(p, range(k + 1))

    def points(self):
        yield ZPoint()
        for s in itertools.count(1):
            for k in range(s):
                yield ZPoint.of({k: s - k})
                yield ZPoint.of({k: k - s})

    def members(self, key):
        if key[0] == "all":
            return self.points()
        fixed = dict(key[1])
        free = max(fixed, default=-1) + 1

        def gen():
            yield ZPoint.of(fixed)
            for v in itertools.count(1):
                yield ZPoint.of({**fixed, free: v})
                yield ZPoint.of({**fixed, free: -v})
        return gen()

    def intersect(self, a, b):
        if a[0] == "all" or b[0] == "all":
            return super().intersect(a, b)
        merged = dict(a[1])
        for k, v in b[1]:
            if merged.get(k, v) != v:
                return None
            merged[k] = v
        return ("cyl", tuple(sorted(merged.items())))

    def encode(self, x):
        return x.to_json()

    def encode_key(self, key):
        return ["all"] if key[0] == "all" else ["cyl", [list(c) for c in key[1]]]


class ProductSpace(SpacePresentation):
    """Finite product of presentations; points are tuples, basics are boxes.

    The neighborhoods of a point run diagonally through the factor enumerations
    (a finite factor enumeration keeps repeating its last entry).
    """

    def __init__(self, factors: Sequence[SpacePresentation]):
        if not factors:
            raise ValueError("empty product")
        self.factors = list(factors)
        self.name = "product(" + ",".join(f.name for f in self.factors) + ")"
        self.is_T1 = all(f.is_T1 for f in self.factors)
        self.discrete = all(f.discrete for f in self.factors)
        self.finite = all(f.finite for f in self.factors)

    def is_point(self, x) -> bool:
        return (isinstance(x, tuple) and len(x) == len(self.factors)
                and all(f.is_point(c) for f, c in zip(self.factors, x)))

    def whole(self):
        return ("box",) + tuple(f.whole() for f in self.factors)

    def contains(self, key, x) -> bool:
        if not self.is_point(x):
            return False
        return all(f.contains(k, c) for f, k, c in zip(self.factors, key[1:], x))

    def neighborhoods(self, x):
        self.require_point(x)
        gens = [f.neighborhoods(c) for f, c in zip(self.factors, x)]
        last: list = [None] * len(gens)
        while True:
            live = False
            for i, g in enumerate(gens):
                nxt = next(g, None)
                if nxt is not None:
                    last[i], live = nxt, True
            if not live:
                return
            yield ("box",) + tuple(last)

    def points(self):
        return _diagonal([f.points() for f in self.factors])

    def members(self, key):
        return _diagonal([f.members(k) for f, k in zip(self.factors, key[1:])])

    def encode(self, x):
        return [f.encode(c) for f, c in zip(self.factors, x)]

    def encode_key(self, key):
        return ["box"] + [f.encode_key(k) for f, k in zip(self.factors, key[1:])]


def _diagonal(gens: list[Iterator]) -> Iterator[tuple]:
    """Enumerate the product of (possibly infinite) iterators, each tuple once."""
    seen: list[list] = [[] for _ in gens]
    done = [False] * len(gens)
    emitted = set()
    for depth in itertools.count():
        grew = False
        for i, g in enumerate(gens):
            if not done[i]:
                try:
                    seen[i].append(next(g))
                    grew = True
                except StopIteration:
                    done[i] = True
        if not grew and depth > 0:
            return
        for combo in itertools.product(*[range(len(s)) for s in seen]):
            if combo not in emitted and max(combo) >= depth - 1:
                emitted.add(combo)
                yield tuple(s[c] for s, c in zip(seen, combo))


_BUILTIN = {"discreteN": DiscreteNaturals, "rationals": Rationals, "zprod": ZProduct,
            "reals": RealLine}


def builtin_space(name: str, **params) -> SpacePresentation:
    """Instantiate a presentation by label: ``discreteN``, ``rationals``, ``zprod``,
    ``finite:{a,b,c}`` (or ``finite`` with ``points=``), ``product`` with ``factors=``."""
    if name in _BUILTIN:
        return _BUILTIN[name]()
    if name.startswith("finite"):
        pts = params.get("points")
        if pts is None:
            body = name.partition(":")[2].strip()
            if not (body.startswith("{") and body.endswith("}")):
                raise ValueError(f"cannot parse finite space label {name!r}")
            pts = [p.strip() for p in body[1:-1].split(",") if p.strip()]
        return FiniteSpace(pts, params.get("basis"))
    if name == "product":
        return ProductSpace([f if isinstance(f, SpacePresentation) else builtin_space(f)
                             for f in params["factors"]])
    raise ValueError(f"unknown space {name!r}")


# ---------------------------------------------------------------- open sets


class OpenSet:
    space: SpacePresentation

    def contains(self, x) -> bool:
        raise NotImplementedError

    def members(self) -> Iterator:
        raise NotImplementedError

    def to_json(self) -> Any:
        raise NotImplementedError

    def pick(self, avoid: Iterable = (), limit: int = 10_000):
        """First member (in presentation order) outside ``avoid``."""
        avoid = set(avoid)
        for i, x in enumerate(self.members()):
            if x not in avoid:
                return x
            if i >= limit:
                break
        raise LookupError(f"no fresh member found in {self.to_json()} within {limit} tries")

    def __contains__(self, x):
        return self.contains(x)


@dataclass(frozen=True)
class BasicOpen(OpenSet):
    space: SpacePresentation
    key: Key

    def contains(self, x) -> bool:
        return self.space.contains(self.key, x)

    def members(self):
        return self.space.members(self.key)

    def to_json(self):
        return self.space.encode_key(self.key)


@dataclass(frozen=True)
class Punctured(OpenSet):
    """``base`` minus finitely many points (open whenever the space is T1)."""

    base: OpenSet
    removed: frozenset

    @property
    def space(self):
        return self.base.space

    def contains(self, x) -> bool:
        return x not in self.removed and self.base.contains(x)

    def members(self):
        return (x for x in self.base.members() if x not in self.removed)

    def to_json(self):
        return {"minus": [self.space.encode(x) for x in self.removed], "of": self.base.to_json()}


@dataclass(frozen=True)
class UnionOpen(OpenSet):
    parts: tuple

    @property
    def space(self):
        return self.parts[0].space

    def contains(self, x) -> bool:
        return any(p.contains(x) for p in self.parts)

    def members(self):
        gens = [p.members() for p in self.parts]
        seen = set()
        while gens:
            for g in list(gens):
                try:
                    x = next(g)
                except StopIteration:
                    gens.remove(g)
                    continue
                if x not in seen:
                    seen.add(x)
                    yield x

    def to_json(self):
        return {"union": [p.to_json() for p in self.parts]}


def punctured(base: OpenSet, points: Iterable) -> OpenSet:
    pts = frozenset(points)
    if not pts:
        return base
    if not base.space.is_T1:
        raise ValueError("removing points keeps a set open only in T1 spaces")
    if isinstance(base, Punctured):
        return Punctured(base.base, base.removed | pts)
    return Punctured(base, pts)


# ---------------------------------------------------------------- CD certificates


@dataclass
class SeparationCertificate:
    """Witness that a finite set is closed and relatively discrete.

    ``assignments`` pairs each member with a basic containing it and no other
    member; ``probes`` pairs probed outside points with a basic missing the set.
    """

    space: SpacePresentation
    assignments: list  # [(point, key)]
    probes: list  # [(point, key)]

    @property
    def points(self) -> list:
        return [x for x, _ in self.assignments]

    def validate(self) -> bool:
        pts = self.points
        if len(set(pts)) != len(pts):
            return False
        for x, key in self.assignments:
            if not self.space.contains(key, x):
                return False
            if any(self.space.contains(key, y) for y in pts if y != x):
                return False
        for y, key in self.probes:
            if y in pts or not self.space.contains(key, y):
                return False
            if any(self.space.contains(key, x) for x in pts):
                return False
        return True

    def restrict(self, subset: Iterable) -> "SeparationCertificate":
        """Certificate for a subset: dropped members become closedness probes."""
        keep = set(subset)
        if not keep <= set(self.points):
            raise ValueError("restriction must be to a subset of the certified points")
        assign = [(x, k) for x, k in self.assignments if x in keep]
        dropped = [(x, k) for x, k in self.assignments if x not in keep]
        return SeparationCertificate(self.space, assign, list(self.probes) + dropped)

    def to_json(self):
        enc, ek = self.space.encode, self.space.encode_key
        return {"space": self.space.name,
                "assignments": [{"point": enc(x), "basic": ek(k)} for x, k in self.assignments],
                "probes": [{"point": enc(y), "basic": ek(k)} for y, k in self.probes]}


@dataclass
class CDSearch:
    certificate: Optional[SeparationCertificate]
    diagnostics: list = field(default_factory=list)
    unseparated: list = field(default_factory=list)
    unprobed: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.certificate is not None


def _separating_key(space, x, others, budget):
    for key in itertools.islice(space.neighborhoods(x), budget):
        if not any(space.contains(key, y) for y in others):
            return key
    return None


def cd_search(points: Sequence, space: SpacePresentation, budget: int = 64,
              probes: Iterable = ()) -> CDSearch:
    """Look for a separation certificate within ``budget`` neighborhoods per point.

    Closedness is probed on the caller's ``probes`` plus the first ``budget``
    points of the universe lying outside the set. Failure is a budget verdict,
    never a refutation.
    """
    pts = list(points)
    for x in pts:
        space.require_point(x)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    out = CDSearch(None)
    assign = []
    for x in pts:
        others = [y for y in pts if y != x]
        key = _separating_key(space, x, others, budget)
        if key is None:
            out.unseparated.append(x)
            out.diagnostics.append(f"accumulation suspected at {space.encode(x)}")
        else:
            assign.append((x, key))
    pset = set(pts)
    outside = [y for y in dict.fromkeys(probes) if y not in pset]
    taken = 0
    for y in space.points():
        if taken >= budget:
            break
        if y not in pset:
            outside.append(y)
            taken += 1
    probe_cert = []
    for y in dict.fromkeys(outside):
        space.require_point(y)
        key = _separating_key(space, y, pts, budget)
        if key is None:
            out.unprobed.append(y)
            out.diagnostics.append(f"accumulation suspected at {space.encode(y)}")
        else:
            probe_cert.append((y, key))
    if not out.unseparated and not out.unprobed:
        out.certificate = SeparationCertificate(space, assign, probe_cert)
    return out


def cd_certificate(points: Sequence, space: SpacePresentation, budget: int = 64,
                   probes: Iterable = ()) -> Optional[SeparationCertificate]:
    return cd_search(points, space, budget, probes).certificate


# ---------------------------------------------------------------- convergence

CERTIFIED_NO, TENTATIVELY_YES, UNDETERMINED = "certified_no", "tentatively_yes", "undetermined"


def _cofinal(outside_idx: np.ndarray, first_inside: int, length: int) -> bool:
    """Outside indices after the first entry show up in every nonempty quarter of the back half."""
    late = outside_idx[outside_idx > first_inside]
    if late.size == 0:
        return False
    chunks = [c for c in np.array_split(np.arange(length // 2, length), 4) if c.size]
    return all(np.isin(c, late).any() for c in chunks)


def _contains_many(space, key, pts) -> np.ndarray:
    if hasattr(space, "contains_many"):
        return space.contains_many(key, pts)
    return np.fromiter((space.contains(key, p) for p in pts), bool, len(pts))


def converges_at_horizon(prefix: Sequence, x, space: SpacePresentation,
                         basis_budget: int = 32) -> str:
    """Three-valued check of ``prefix -> x`` against the first ``basis_budget`` neighborhoods.

    ``certified_no``: some neighborhood is entered and then left cofinally in the
    back half of the prefix. ``tentatively_yes``: every neighborhood that the
    prefix ever enters holds a tail of it (two terms at least, unless the prefix
    has one term), and either all are entered or the prefix entered one of them
    in its back half (still closing in).
    """
    space.require_point(x)
    if len(prefix) == 0:
        raise ValueError("prefix must be nonempty")
    n = len(prefix)
    entered_tails, never_entered, ok = [], 0, True
    for key in itertools.islice(space.neighborhoods(x), basis_budget):
        inside = _contains_many(space, key, prefix)
        if not inside.any():
            never_entered += 1
            continue
        out_idx = np.flatnonzero(~inside)
        first_in = int(np.argmax(inside))
        if _cofinal(out_idx, first_in, n):
            return CERTIFIED_NO
        if not inside[-1]:
            ok = False
            continue
        start = int(out_idx[-1]) + 1 if out_idx.size else 0
        if n - start < min(2, n):  # a lone last term sits in every neighborhood of itself
            ok = False
            continue
        entered_tails.append(start)
    if not ok or not entered_tails:
        return UNDETERMINED
    if never_entered == 0 or max(entered_tails) > n // 2:
        return TENTATIVELY_YES
    return UNDETERMINED


# ---------------------------------------------------------------- cover sequences


@dataclass(frozen=True)
class CoverSequence:
    """An eventually repeating sequence of basic opens of a finite space.

    Index ``m >= 1`` reads ``head[m-1]`` and then cycles through ``cycle``. In
    ``finite`` mode the given list is read with its last entry repeated forever.
    """

    head: tuple
    cycle: tuple
    mode: str = "eventually_repeating"

    @staticmethod
    def finite(entries: Sequence) -> "CoverSequence":
        entries = tuple(entries)
        if not entries:
            raise ValueError("empty cover")
        return CoverSequence(entries[:-1], entries[-1:], "finite")

    @staticmethod
    def repeating(head: Sequence, cycle: Sequence) -> "CoverSequence":
        if not cycle:
            raise ValueError("cycle must be nonempty")
        return CoverSequence(tuple(head), tuple(cycle))

    def entry(self, m: int):
        if m < 1:
            raise ValueError("cover indices start at 1")
        if m <= len(self.head):
            return self.head[m - 1]
        return self.cycle[(m - len(self.head) - 1) % len(self.cycle)]

    def validate(self, space: "FiniteSpace"):
        for k in self.head + self.cycle:
            if k not in space.basis_keys:
                raise ValueError(f"{k!r} is not a basis index of {space.name}")

    def to_json(self):
        return {"mode": self.mode, "head": [list(k) for k in self.head],
                "cycle": [list(k) for k in self.cycle]}


def _require_finite(space):
    if not isinstance(space, FiniteSpace):
        raise ValueError("cover classification needs a finite space")


def vec_cover_class(cover: CoverSequence, space: FiniteSpace) -> str:
    """Exact classification: ``both``, ``vec_O``, ``vec_Gamma`` or ``neither``."""
    _require_finite(space)
    cover.validate(space)
    pts = space.point_list
    is_o = all(any(space.contains(k, p) for k in cover.head + cover.cycle) for p in pts)
    is_g = all(all(space.contains(k, p) for k in cover.cycle) for p in pts)
    if is_o and is_g:
        return "both"
    if is_g:
        return "vec_Gamma"
    return "vec_O" if is_o else "neither"


def escape_map(cover: CoverSequence, space: FiniteSpace, x) -> MonotoneMap:
    """``phi(1) = min{m : x not in U_m}``, ``phi(n+1) = min{m > phi(n) : x not in U_m}``.

    Requires ``x`` to miss some cycle entry, so the set of such ``m`` is infinite.
    """
    hpos = [m for m in range(1, len(cover.head) + 1) if not space.contains(cover.head[m - 1], x)]
    cpos = [i for i, k in enumerate(cover.cycle) if not space.contains(k, x)]
    if not cpos:
        raise ValueError(f"{x!r} lies in every cycle entry; no escape subsequence")
    h, c, p = len(hpos), len(cover.cycle), len(cpos)
    off = len(cover.head)

    def ev(n):
        if n <= h:
            return hpos[n - 1]
        q, r = divmod(n - h - 1, p)
        return off + q * c + cpos[r] + 1

    def vec(idx):
        idx = np.asarray(idx, dtype=np.int64)
        out = np.empty_like(idx)
        small = idx <= h
        if small.any():
            out[small] = np.asarray(hpos, dtype=np.int64)[idx[small] - 1]
        q, r = np.divmod(idx[~small] - h - 1, p)
        out[~small] = off + q * c + np.asarray(cpos, dtype=np.int64)[r] + 1
        return out

    return MonotoneMap(ev, f"escape:{x}", vec)


@dataclass
class GammaReport:
    cover_class: str
    is_gamma: bool
    sample_results: dict  # label -> subcover is vec_O within the horizon
    escape: Optional[dict]
    horizon: int
    mode: str

    @property
    def consistent(self) -> bool:
        if self.is_gamma:
            return all(self.sample_results.values())
        return self.escape is not None and not self.escape["subcover_is_vec_O"]


def _subcover_is_o(cover, space, phi: MonotoneMap, horizon: int) -> bool:
    """Whether every point is met by some ``U_{phi(n)}``, ``n <= horizon``.

    Entries repeat with period ``len(cycle)`` after the head, so scanning stops
    early once all points are seen.
    """
    missing = set(space.point_list)
    for m in phi.prefix(horizon):
        key = cover.entry(int(m))
        missing = {p for p in missing if not space.contains(key, p)}
        if not missing:
            return True
    return False


def gamma_equals_sO_check(space: FiniteSpace, cover: CoverSequence,
                          phi_samples: Sequence[MonotoneMap], horizon: int = 2000) -> GammaReport:
    """Check ``cover`` is vec_Gamma iff every sampled subsequence is vec_O.

    When the cover is not vec_Gamma the escape subsequence for a point missing a
    cycle entry is built explicitly and shown to miss that point everywhere.
    """
    _require_finite(space)
    cls = vec_cover_class(cover, space)
    is_g = cls in ("both", "vec_Gamma")
    samples = {phi.label: _subcover_is_o(cover, space, phi, horizon) for phi in phi_samples}
    escape = None
    if not is_g:
        x = next(p for p in space.point_list
                 if not all(space.contains(k, p) for k in cover.cycle))
        phi = escape_map(cover, space, x)
        period = len(cover.head) + 2 * len(cover.cycle) + 2
        idx = phi.prefix(period)
        misses = all(not space.contains(cover.entry(m), x) for m in idx)
        escape = {"point": x, "map": phi.label, "indices": idx,
                  "subcover_is_vec_O": not misses, "map_obj": phi}
    return GammaReport(cls, is_g, samples, escape, horizon, cover.mode)
