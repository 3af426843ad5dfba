"""Finite subsets of a presented space under the Pixley-Roy and Vietoris topologies.

Ground opens inside hyperspace basics are finite unions of presented basics,
the whole space, or the complement of a certified closed finite set.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .seqmap import MonotoneMap
from .spaces import (BasicOpen, OpenSet, SeparationCertificate, SpacePresentation, UnionOpen,
                     cd_search, punctured)


@dataclass(frozen=True)
class FiniteSubset:
    elements: frozenset

    def __post_init__(self):
        if not self.elements:
            raise ValueError("finite subsets in the hyperspace are nonempty")

    @staticmethod
    def of(points: Iterable) -> "FiniteSubset":
        return FiniteSubset(frozenset(points))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __le__(self, other: "FiniteSubset"):
        return self.elements <= other.elements

    def to_json(self, space: SpacePresentation):
        return sorted((space.encode(x) for x in self.elements), key=repr)


@dataclass(frozen=True)
class GroundOpen:
    """``union`` of basics, ``whole`` space, ``avoid`` (the space minus a closed set)
    or ``union_avoid`` (basics together with the space minus a closed set)."""

    space: SpacePresentation
    kind: str
    basics: tuple = ()
    avoided: frozenset = frozenset()

    @staticmethod
    def basic(space, key) -> "GroundOpen":
        return GroundOpen(space, "union", (key,))

    @staticmethod
    def union(space, keys: Iterable) -> "GroundOpen":
        keys = tuple(dict.fromkeys(keys))
        if not keys:
            raise ValueError("empty union")
        return GroundOpen(space, "union", keys)

    @staticmethod
    def whole(space) -> "GroundOpen":
        return GroundOpen(space, "whole")

    @staticmethod
    def avoid(space, closed_points: Iterable) -> "GroundOpen":
        return GroundOpen(space, "avoid", avoided=frozenset(closed_points))

    @staticmethod
    def union_avoid(space, keys: Iterable, closed_points: Iterable) -> "GroundOpen":
        return GroundOpen(space, "union_avoid", tuple(dict.fromkeys(keys)), frozenset(closed_points))

    def contains(self, x) -> bool:
        if self.kind == "whole":
            return self.space.is_point(x)
        if self.kind == "avoid":
            return self.space.is_point(x) and x not in self.avoided
        if self.kind == "union_avoid" and self.space.is_point(x) and x not in self.avoided:
            return True
        return any(self.space.contains(k, x) for k in self.basics)

    def as_open(self) -> OpenSet:
        """The same open as a :mod:`spaces` open set (for ground strategies)."""
        whole = BasicOpen(self.space, self.space.whole())
        if self.kind == "whole":
            return whole
        if self.kind == "avoid":
            return punctured(whole, self.avoided)
        if self.kind == "union_avoid":
            raise ValueError("union_avoid opens are only used inside certificates")
        if len(self.basics) == 1:
            return BasicOpen(self.space, self.basics[0])
        return UnionOpen(tuple(BasicOpen(self.space, k) for k in self.basics))

    def to_json(self):
        if self.kind == "whole":
            return ["whole"]
        avoid = sorted((self.space.encode(x) for x in self.avoided), key=repr)
        if self.kind == "avoid":
            return {"avoid": avoid}
        basics = [self.space.encode_key(k) for k in self.basics]
        if self.kind == "union_avoid":
            return {"union": basics, "or_avoid": avoid}
        return basics


def _union_of(opens: Sequence[GroundOpen]) -> GroundOpen:
    space = opens[0].space
    if any(o.kind != "union" for o in opens):
        if any(o.kind == "whole" for o in opens):
            return GroundOpen.whole(space)
        raise ValueError("unions are only formed from basic-union opens")
    return GroundOpen.union(space, itertools.chain.from_iterable(o.basics for o in opens))


@dataclass(frozen=True)
class PRBasicOpen:
    """``[F, U] = {G : F ⊆ G ⊆ U}``; ``empty`` is set when ``F`` is not inside ``U``."""

    F: FiniteSubset
    U: GroundOpen
    empty: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "empty", not all(self.U.contains(x) for x in self.F))

    def to_json(self):
        return {"F": self.F.to_json(self.U.space), "U": self.U.to_json(), "empty": self.empty}


@dataclass(frozen=True)
class VietorisBasicOpen:
    """``[U_1, ..., U_n]``: subsets of the union meeting every ``U_i``."""

    opens: tuple

    def __post_init__(self):
        if not self.opens:
            raise ValueError("a Vietoris basic needs at least one open")

    def to_json(self):
        return {"opens": [o.to_json() for o in self.opens]}


def pr_member(G: FiniteSubset, b: PRBasicOpen) -> bool:
    return b.F <= G and all(b.U.contains(x) for x in G)


def vietoris_member(G: FiniteSubset, b: VietorisBasicOpen) -> bool:
    return (all(any(o.contains(x) for o in b.opens) for x in G)
            and all(any(o.contains(x) for x in G) for o in b.opens))


def append_point(F: FiniteSubset, x) -> FiniteSubset:
    return FiniteSubset(F.elements | {x})


def refine_vietoris_inside_pr(F: FiniteSubset, b: PRBasicOpen,
                              separators: Optional[dict] = None) -> VietorisBasicOpen:
    """Vietoris basic around ``F`` inside the coarsening of ``[F, U]``.

    Without ``separators`` this is ``[U]``; with a point-to-basic map (each basic
    assumed inside ``U``) it is ``[U_x : x in F]``.
    """
    if not pr_member(F, b):
        raise ValueError("F is not a member of the Pixley-Roy basic")
    if separators is None:
        return VietorisBasicOpen((b.U,))
    space = b.U.space
    opens = []
    for x in sorted(F.elements, key=repr):
        key = separators[x]
        if not space.contains(key, x):
            raise ValueError(f"separator for {x!r} does not contain it")
        opens.append(GroundOpen.basic(space, key))
    return VietorisBasicOpen(tuple(opens))


# ---------------------------------------------------------------- certificates


@dataclass
class HyperCDCertificate:
    """Separation certificate for a family of finite sets.

    ``separators[i]`` is a hyperspace basic containing ``family[i]`` and no other
    member; ``probes`` pair outside finite sets with basics missing the family.
    """

    space: SpacePresentation
    topology: str  # "vietoris" or "pixley_roy"
    family: list
    separators: list
    probes: list = field(default_factory=list)

    def _member(self, G, b) -> bool:
        return vietoris_member(G, b) if self.topology == "vietoris" else pr_member(G, b)

    def violations(self) -> list:
        """Exhaustive membership scan; empty list means the certificate is valid."""
        bad = []
        if len(set(self.family)) != len(self.family):
            bad.append("family has repeated members")
        for i, (F, b) in enumerate(zip(self.family, self.separators)):
            if not self._member(F, b):
                bad.append(f"member {i} not inside its separator")
            for j, G in enumerate(self.family):
                if j != i and self._member(G, b):
                    bad.append(f"member {j} inside separator {i}")
        fam = set(self.family)
        for k, (G, b) in enumerate(self.probes):
            if G in fam:
                bad.append(f"probe {k} is a family member")
            if not self._member(G, b):
                bad.append(f"probe {k} not inside its basic")
            for j, F in enumerate(self.family):
                if self._member(F, b):
                    bad.append(f"member {j} inside probe basic {k}")
        return bad

    def validate(self) -> bool:
        return not self.violations()

    def to_json(self):
        return {"topology": self.topology, "space": self.space.name,
                "family": [F.to_json(self.space) for F in self.family],
                "separators": [b.to_json() for b in self.separators],
                "probes": [{"set": G.to_json(self.space), "basic": b.to_json()}
                           for G, b in self.probes]}


@dataclass
class GroupedFamily:
    blocks: list  # FiniteSubset per block
    bounds: list  # phi(n) for each complete block
    certificate: HyperCDCertificate

    @property
    def union(self) -> frozenset:
        return frozenset().union(*(b.elements for b in self.blocks))


def block_bounds(phi: MonotoneMap, length: int) -> list[int]:
    """``[phi(1), ..., phi(m)]`` with ``m`` maximal such that ``phi(m) <= length``."""
    out = []
    for n in itertools.count(1):
        v = phi(n)
        if v > length:
            return out
        out.append(v)


def default_hyper_probes(blocks: Sequence[FiniteSubset], outside: Iterable = ()) -> list[FiniteSubset]:
    """Nearby non-members: blocks minus a point, a block plus a neighbour's point,
    merged consecutive blocks, and blocks extended by outside points."""
    fam = set(blocks)
    cands = []
    for i, F in enumerate(blocks):
        pts = sorted(F.elements, key=repr)
        if len(pts) > 1:
            cands.append(FiniteSubset(F.elements - {pts[0]}))
        if i + 1 < len(blocks):
            nxt = sorted(blocks[i + 1].elements, key=repr)
            cands.append(append_point(F, nxt[0]))
            cands.append(FiniteSubset(F.elements | blocks[i + 1].elements))
    for y in outside:
        cands.append(FiniteSubset.of([y]))
        if blocks:
            cands.append(append_point(blocks[0], y))
    return [G for G in dict.fromkeys(cands) if G not in fam]


def hyper_probe_basic(G: FiniteSubset, point_cert: SeparationCertificate,
                      pool: frozenset) -> VietorisBasicOpen:
    """Vietoris basic around a non-member ``G`` that misses every block.

    If ``G`` leaves the certified set ``pool`` this is ``[X minus pool, X]``;
    otherwise ``[U_x : x in G]`` from the point separators.
    """
    space = point_cert.space
    if not G.elements <= pool:
        return VietorisBasicOpen((GroundOpen.avoid(space, pool), GroundOpen.whole(space)))
    sep = dict(point_cert.assignments)
    return VietorisBasicOpen(tuple(GroundOpen.basic(space, sep[x])
                                   for x in sorted(G.elements, key=repr)))


def family_certificate(family: Sequence[FiniteSubset], cert: SeparationCertificate,
                       probes: Optional[Iterable[FiniteSubset]] = None) -> HyperCDCertificate:
    """Vietoris certificate for finite sets whose union carries a point certificate.

    Each member gets ``[U_x : x in F]``; repeated members are merged (the payoff
    is about the set of selections).
    """
    if not cert.validate():
        raise ValueError("point certificate does not validate")
    fam = list(dict.fromkeys(family))
    pool = frozenset().union(*(F.elements for F in fam))
    if not pool <= set(cert.points):
        raise ValueError("certificate does not cover the union of the family")
    sub = cert.restrict(pool)
    sep = dict(sub.assignments)
    space = cert.space
    seps = [VietorisBasicOpen(tuple(GroundOpen.basic(space, sep[x])
                                    for x in sorted(F.elements, key=repr))) for F in fam]
    if probes is None:
        probes = default_hyper_probes(fam, [y for y, _ in cert.probes])
    probe_pairs = [(G, hyper_probe_basic(G, sub, pool)) for G in probes if G not in set(fam)]
    return HyperCDCertificate(space, "vietoris", fam, seps, probe_pairs)


def group_cd(prefix: Sequence, cert: SeparationCertificate, phi: MonotoneMap,
             probes: Optional[Iterable[FiniteSubset]] = None) -> GroupedFamily:
    """Group ``prefix`` into the blocks cut at ``phi(1) < phi(2) < ...``.

    Separators are ``[U_j : j in block]`` from the point certificate; probes are
    handled by the two closedness cases (leave the set, or stay inside it).
    """
    if not cert.validate():
        raise ValueError("point certificate does not validate")
    pts = list(prefix)
    if set(pts) != set(cert.points) or len(pts) != len(cert.points):
        raise ValueError("certificate must cover exactly the prefix points")
    bounds = block_bounds(phi, len(pts))
    if not bounds:
        raise ValueError(f"phi(1) = {phi(1)} exceeds the prefix length {len(pts)}")
    blocks, lo = [], 0
    for hi in bounds:
        blocks.append(FiniteSubset.of(pts[lo:hi]))
        lo = hi
    hc = family_certificate(blocks, cert, probes)
    return GroupedFamily(blocks, bounds, hc)


def cd_push_pfin_to_pr(cert: HyperCDCertificate) -> HyperCDCertificate:
    """Vietoris separator ``[U_1..U_n]`` of ``F`` becomes ``[F, U_1 ∪ ... ∪ U_n]``.

    A probe ``(G, [V_1..V_k])`` becomes ``(G, [G, V_1 ∪ ... ∪ V_k])``.
    """
    if cert.topology != "vietoris":
        raise ValueError("expected a Vietoris certificate")
    if not cert.validate():
        raise ValueError("input certificate does not validate")
    seps = [PRBasicOpen(F, _union_of(b.opens)) for F, b in zip(cert.family, cert.separators)]
    probes = []
    for G, b in cert.probes:
        if all(o.kind == "union" for o in b.opens) or any(o.kind == "whole" for o in b.opens):
            probes.append((G, PRBasicOpen(G, _union_of(b.opens))))
        else:
            # [X minus S, X] case: the union is the whole space
            probes.append((G, PRBasicOpen(G, GroundOpen.whole(cert.space))))
    return HyperCDCertificate(cert.space, "pixley_roy", list(cert.family), seps, probes)


def brute_force_vietoris_separation(family: Sequence[FiniteSubset], space: SpacePresentation,
                                    depth: int = 64) -> Optional[list]:
    """Oracle independent of any point certificate.

    For each member, tries ``[N_d(x) : x in F]`` for ``d = 1..depth`` where
    ``N_d(x)`` is the d-th enumerated neighborhood of ``x``.
    """
    out = []
    for i, F in enumerate(family):
        gens = {x: list(itertools.islice(space.neighborhoods(x), depth)) for x in F}
        found = None
        for d in range(depth):
            opens = tuple(GroundOpen.basic(space, gens[x][min(d, len(gens[x]) - 1)])
                          for x in sorted(F.elements, key=repr))
            b = VietorisBasicOpen(opens)
            if all(not vietoris_member(G, b) for j, G in enumerate(family) if j != i):
                found = b
                break
        if found is None:
            return None
        out.append(found)
    return out


def scd_check(family: Sequence[FiniteSubset], space: SpacePresentation, budget: int = 64,
              probes: Iterable = ()):
    """Point-level CD search for the union of a family (the 'S' in SCD)."""
    union = []
    for F in family:
        for x in sorted(F.elements, key=repr):
            if x not in union:
                union.append(x)
    return cd_search(union, space, budget, probes)
