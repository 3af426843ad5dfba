"""Finite-horizon selection games G1, Gfin and vec-G1 with certificate adjudication."""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .hyperspaces import (FiniteSubset, HyperCDCertificate, PRBasicOpen, VietorisBasicOpen,
                          family_certificate, pr_member, vietoris_member)
from .spaces import (BasicOpen, OpenSet, Punctured, Rationals, SeparationCertificate,
                     SpacePresentation, UnionOpen, ZPoint, ZProduct, cd_search, punctured)

P1, P2 = "P1", "P2"
KINDS = ("full", "markov", "predetermined", "constant")
P1_CERTIFIED, P2_CERTIFIED, UNDETERMINED = "P1_certified", "P2_certified", "undetermined"


class StrategyFault(RuntimeError):
    """A strategy made an illegal move; this is a bug in the strategy, not a loss."""

    def __init__(self, round_index: int, reason: str):
        super().__init__(f"round {round_index}: {reason}")
        self.round_index = round_index
        self.reason = reason


@dataclass(frozen=True)
class Strategy:
    """A rule whose inputs depend on ``kind``.

    P1: full ``rule(selections)``, markov ``rule(last_selection, n)``,
    predetermined ``rule(n)``, constant ``rule()``.
    P2: full ``rule(moves, selections)`` (``moves`` includes the current one),
    markov ``rule(move, n)``, predetermined ``rule(n)``, constant ``rule()``.
    """

    owner: str
    kind: str
    rule: Callable
    label: str = ""

    def __post_init__(self):
        if self.owner not in (P1, P2):
            raise ValueError(f"owner must be P1 or P2, got {self.owner!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")

    def move(self, n: int, moves: list, selections: list):
        if self.kind == "constant":
            return self.rule()
        if self.kind == "predetermined":
            return self.rule(n)
        if self.owner == P1:
            if self.kind == "markov":
                return self.rule(selections[-1] if selections else None, n)
            return self.rule(list(selections))
        if self.kind == "markov":
            return self.rule(moves[-1], n)
        return self.rule(list(moves), list(selections))


@dataclass
class GameSpec:
    """``selector``: ``single`` (G1 / vec-G1) or ``finite`` (Gfin).

    ``adjudicator`` is ``cd``, ``cd_injective``, ``scd`` (hyperspace moves), ``none``
    or a callable ``(transcript) -> Adjudication``. ``probes`` are declared
    landmark points for accumulation and closedness checks.
    """

    space: SpacePresentation
    horizon: int
    selector: str = "single"
    adjudicator: Any = "cd"
    budget: int = 32
    probes: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.selector not in ("single", "finite"):
            raise ValueError(f"unknown selector {self.selector!r}")


@dataclass
class Adjudication:
    verdict: str
    certificate: Any = None
    diagnostics: list = field(default_factory=list)

    def to_json(self):
        c = self.certificate
        return {"verdict": self.verdict,
                "certificate": c.to_json() if hasattr(c, "to_json") else c,
                "diagnostics": list(self.diagnostics)}


@dataclass
class Transcript:
    spec: GameSpec
    rounds: list = field(default_factory=list)  # [(move, selection)]
    result: Optional[Adjudication] = None

    @property
    def moves(self) -> list:
        return [m for m, _ in self.rounds]

    @property
    def selections(self) -> list:
        return [s for _, s in self.rounds]

    @property
    def verdict(self) -> str:
        return self.result.verdict if self.result else UNDETERMINED

    def selected_points(self) -> list:
        """Distinct points in order of first selection (finite selections flattened)."""
        out = []
        seen = set()
        for s in self.selections:
            pts = sorted(s, key=repr) if isinstance(s, (set, frozenset, FiniteSubset)) else [s]
            for x in pts:
                if x not in seen:
                    seen.add(x)
                    out.append(x)
        return out

    def to_json(self):
        space = self.spec.space

        def enc_move(m):
            return m.to_json() if hasattr(m, "to_json") else repr(m)

        def enc_sel(s):
            if isinstance(s, FiniteSubset):
                return s.to_json(space)
            if isinstance(s, (set, frozenset)):
                return sorted((space.encode(x) for x in s), key=repr)
            return space.encode(s)

        return {"space": space.name, "horizon": self.spec.horizon, "selector": self.spec.selector,
                "rounds": [{"move": enc_move(m), "selection": enc_sel(s)} for m, s in self.rounds],
                "result": self.result.to_json() if self.result else None}


def is_legal(move, selection, selector: str = "single") -> bool:
    if isinstance(move, tuple):  # a union of hyperspace basics
        return any(is_legal(b, selection, selector) for b in move)
    if isinstance(move, VietorisBasicOpen):
        return isinstance(selection, FiniteSubset) and vietoris_member(selection, move)
    if isinstance(move, PRBasicOpen):
        return isinstance(selection, FiniteSubset) and not move.empty and pr_member(selection, move)
    if selector == "finite":
        pts = list(selection.elements if isinstance(selection, FiniteSubset) else selection)
        return bool(pts) and all(move.contains(x) for x in pts)
    return move.contains(selection)


def run(spec: GameSpec, p1: Strategy, p2: Strategy) -> Transcript:
    if p1.owner != P1 or p2.owner != P2:
        raise ValueError("strategies must be owned by P1 and P2 respectively")
    t = Transcript(spec)
    moves, sels = [], []
    for n in range(1, spec.horizon + 1):
        move = p1.move(n, moves, sels)
        moves.append(move)
        sel = p2.move(n, moves, sels)
        if not is_legal(move, sel, spec.selector):
            raise StrategyFault(n, f"selection {sel!r} is not a legal response to {move!r}")
        sels.append(sel)
        t.rounds.append((move, sel))
    t.result = adjudicate(t)
    return t


def adjudicate(t: Transcript) -> Adjudication:
    a = t.spec.adjudicator
    if callable(a):
        return a(t)
    if a == "none":
        return Adjudication(UNDETERMINED, None, ["no adjudicator"])
    if a in ("cd", "cd_injective"):
        return adjudicate_cd(t, t.spec.space, t.spec.budget, injective=a == "cd_injective")
    if a == "scd":
        return adjudicate_scd(t, t.spec.space, t.spec.budget)
    raise ValueError(f"unknown adjudicator {a!r}")


# ---------------------------------------------------------------- accumulation


@dataclass
class AccumulationCertificate:
    """Every one of the first ``len(witnesses)`` neighborhoods of ``point`` holds a
    selection other than ``point`` from the back half of the transcript."""

    space: SpacePresentation
    point: Any
    witnesses: list  # [(key, round index, selected point)]

    def validate(self, selections: Sequence) -> bool:
        half = len(selections) // 2
        for key, n, y in self.witnesses:
            if n <= half or y == self.point or not self.space.contains(key, y):
                return False
            s = selections[n - 1]
            pts = s if isinstance(s, (set, frozenset, FiniteSubset)) else [s]
            if y not in pts:
                return False
        return True

    def to_json(self):
        return {"point": self.space.encode(self.point),
                "witnesses": [{"basic": self.space.encode_key(k), "round": n,
                               "selection": self.space.encode(y)} for k, n, y in self.witnesses]}


def move_landmarks(moves: Iterable) -> list:
    """Points named by the moves themselves: the punctures of punctured moves."""
    out = []
    for m in moves:
        while isinstance(m, Punctured):
            out.extend(sorted(m.removed, key=repr))
            m = m.base
    return list(dict.fromkeys(out))


def find_accumulation(selections: Sequence, space: SpacePresentation, probes: Iterable,
                      budget: int) -> Optional[AccumulationCertificate]:
    L = len(selections)
    depth = min(budget, L // 2)
    if depth < 1:
        return None
    late = []
    for n in range(L // 2 + 1, L + 1):
        s = selections[n - 1]
        for y in (sorted(s, key=repr) if isinstance(s, (set, frozenset, FiniteSubset)) else [s]):
            late.append((n, y))
    for x in probes:
        if not space.is_point(x):
            continue
        wit = []
        for key in itertools.islice(space.neighborhoods(x), depth):
            hit = next(((n, y) for n, y in late if y != x and space.contains(key, y)), None)
            if hit is None:
                break
            wit.append((key, hit[0], hit[1]))
        if len(wit) == depth:
            return AccumulationCertificate(space, x, wit)
    return None


def adjudicate_cd(t: Transcript, space: SpacePresentation, budget: int = 32,
                  probes: Iterable = (), injective: bool = False) -> Adjudication:
    """P1 wins on an accumulation certificate at a probe (or a repeat, for the
    injective game); P2 wins on a CD certificate; otherwise undetermined."""
    sels = t.selections
    if injective and len(set(map(_hashable, sels))) != len(sels):
        seen = {}
        for n, s in enumerate(sels, 1):
            if _hashable(s) in seen:
                return Adjudication(P1_CERTIFIED, {"repeat": [seen[_hashable(s)], n]},
                                    ["selections are not injective"])
            seen[_hashable(s)] = n
    pts = t.selected_points()
    cand = list(dict.fromkeys(list(probes) + list(t.spec.probes) + move_landmarks(t.moves)))
    acc = find_accumulation(sels, space, cand, budget)
    if acc is not None:
        return Adjudication(P1_CERTIFIED, acc,
                            [f"accumulation at {space.encode(acc.point)}"])
    res = cd_search(pts, space, budget, cand)
    if res.found:
        return Adjudication(P2_CERTIFIED, res.certificate, [])
    return Adjudication(UNDETERMINED, None, res.diagnostics)


def _hashable(s):
    return s.elements if isinstance(s, FiniteSubset) else s


def adjudicate_scd(t: Transcript, space: SpacePresentation, budget: int = 32,
                   probes: Iterable = ()) -> Adjudication:
    """Hyperspace selections: the union must be CD in the ground space and the
    family gets a Vietoris certificate built from the union's point certificate."""
    fam = t.selections
    pts = t.selected_points()
    cand = list(dict.fromkeys(list(probes) + list(t.spec.probes)))
    res = cd_search(pts, space, budget, cand)
    if not res.found:
        return Adjudication(UNDETERMINED, None, res.diagnostics)
    hc = family_certificate(fam, res.certificate)
    bad = hc.violations()
    if bad:
        return Adjudication(UNDETERMINED, None, bad)
    return Adjudication(P2_CERTIFIED, {"union": res.certificate, "family": hc}, [])


# ---------------------------------------------------------------- strategies


def constant_p1(move: OpenSet, label: str = "constant") -> Strategy:
    return Strategy(P1, "constant", lambda: move, label)


def predetermined_p1(moves: Callable[[int], Any], label: str = "predetermined") -> Strategy:
    return Strategy(P1, "predetermined", moves, label)


def nth_member_p2(offset: int = 0, label: Optional[str] = None) -> Strategy:
    """Markov: the ``(n + offset)``-th member of the move, falling back to the first."""

    def rule(move, n):
        got = list(itertools.islice(move.members(), n - 1 + offset, n + offset))
        return got[0] if got else next(iter(move.members()))

    return Strategy(P2, "markov", rule, label or f"nth_member+{offset}")


def least_p2(label: str = "least") -> Strategy:
    return Strategy(P2, "markov", lambda move, n: next(iter(move.members())), label)


def seeded_member_p2(seed: int, window: int = 16, label: Optional[str] = None) -> Strategy:
    """Markov: a member among the first ``window`` chosen by a seeded stream keyed on ``n``."""

    def rule(move, n):
        rng = random.Random(f"{seed}/{n}")
        got = list(itertools.islice(move.members(), window))
        return got[rng.randrange(len(got))]

    return Strategy(P2, "markov", rule, label or f"seeded:{seed}")


def pi_base_attack(space: SpacePresentation, x, pi_base: Optional[Callable[[int], Any]] = None,
                   isolation_budget: int = 16) -> Strategy:
    """Predetermined P1 strategy playing ``U_n`` minus ``{x}``.

    ``pi_base(n)`` returns the n-th basis key of a local pi-base at ``x``; for the
    rationals the default is ``(x - 1/n, x + 1/n)``.
    """
    space.require_point(x)
    if not space.is_T1:
        raise ValueError("the pi-base attack needs {x} closed (T1 space)")
    if space.discrete:
        raise ValueError(f"{space.encode(x)} is isolated; the attack needs a non-isolated point")
    for key in itertools.islice(space.neighborhoods(x), isolation_budget):
        if len(list(itertools.islice(space.members(key), 2))) < 2:
            raise ValueError(f"{space.encode(x)} is isolated by basic {key!r}")
    if pi_base is None:
        if not isinstance(space, Rationals):
            raise ValueError("declare a pi_base for spaces other than the rationals")
        pi_base = lambda n: next(itertools.islice(space.neighborhoods(x), n - 1, None))

    def rule(n):
        return punctured(BasicOpen(space, pi_base(n)), {x})

    return Strategy(P1, "predetermined", rule, f"pi_base_attack@{space.encode(x)}")


def _cylinder_of(move) -> tuple:
    if isinstance(move, BasicOpen) and move.key[0] == "cyl":
        return move.key[1]
    if isinstance(move, BasicOpen) and move.key[0] == "all":
        return ()
    raise ValueError(f"expected a cylinder basic [f;F], got {move!r}")


def zk_markov_strategy(space: ZProduct) -> Strategy:
    """``tau([f;F], n)``: ``f`` on ``F`` and ``n`` elsewhere."""
    if not isinstance(space, ZProduct):
        raise ValueError("zk_markov_strategy needs the integer-product presentation")

    def rule(move, n):
        return ZPoint.of(dict(_cylinder_of(move)), default=n)

    return Strategy(P2, "markov", rule, "zk_markov")


def random_cylinder_p1(space: ZProduct, seed: int, coords: int = 8, values: int = 5,
                       max_support: int = 4) -> Strategy:
    """Predetermined P1 playing seeded cylinders ``[f;F]`` with ``F`` inside ``{0..coords-1}``."""

    def rule(n):
        rng = random.Random(f"{seed}/cyl/{n}")
        F = rng.sample(range(coords), rng.randint(0, max_support))
        f = ZPoint.of({k: rng.randint(-values, values) for k in F})
        return BasicOpen(space, space.cylinder(f, F)) if F else BasicOpen(space, space.whole())

    return Strategy(P1, "predetermined", rule, f"random_cylinders:{seed}")


def escape_hits(selections: Sequence[ZPoint], h: ZPoint, x: int) -> int:
    """``#{n : selection_n in [h;{x}]}``."""
    return sum(1 for s in selections if s(x) == h(x))


def sqrt_convergents(d: int):
    """Continued-fraction convergents of ``sqrt(d) - floor(sqrt(d))`` in (0, 1)."""
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise ValueError("d must not be a perfect square")
    m, q, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while True:
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        c = Fraction(h, k) - a0
        if 0 < c < 1:
            yield c


def _interval_of(move):
    """Rational endpoints and removed points of an interval-like move."""
    removed = frozenset()
    while isinstance(move, Punctured):
        removed |= move.removed
        move = move.base
    if isinstance(move, UnionOpen):
        move = move.parts[0]
    if isinstance(move, BasicOpen) and move.key[0] == "iv":
        return move.key[1], move.key[2], removed
    if isinstance(move, BasicOpen) and move.key[0] == "all":
        return 0, 1, removed
    raise ValueError(f"expected an interval move on the rationals, got {move!r}")


def irrational_target_p2(d: int = 2, label: Optional[str] = None) -> Strategy:
    """Markov on the rationals: in ``(a, b)`` play ``a + (b - a) c`` with ``c`` the
    n-th convergent of ``frac(sqrt d)``, so repeated moves converge to an irrational."""

    def rule(move, n):
        a, b, removed = _interval_of(move)
        for i, c in enumerate(sqrt_convergents(d), 1):
            if i >= n:
                y = a + (b - a) * c
                if y not in removed:
                    return y

    return Strategy(P2, "markov", rule, label or f"irrational_target:{d}")
