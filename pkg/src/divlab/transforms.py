"""Strategy and certificate transformers, each checked by replaying a game."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from . import games
from .divergence import SeparationBound
from .games import (P1, P2, P2_CERTIFIED, GameSpec, Strategy, StrategyFault, Transcript,
                    adjudicate_cd, run)
from .hyperspaces import (FiniteSubset, GroundOpen, HyperCDCertificate, PRBasicOpen,
                          VietorisBasicOpen, family_certificate, pr_member, vietoris_member)
from .seqmap import pairing, unpairing
from .spaces import (BasicOpen, OpenSet, RealLine, SpacePresentation, ZProduct, cd_search,
                     punctured)

SOUND = "sound"


@dataclass
class TransformReport:
    name: str
    descriptor: str
    sources: list  # source transcripts
    replay: Any  # replay transcript (or family of selections)
    validation: str = SOUND
    violation: Optional[dict] = None  # {"round": n, "reason": ...}
    details: dict = field(default_factory=dict)

    @property
    def sound(self) -> bool:
        return self.validation == SOUND

    def violate(self, round_index, reason):
        self.validation = "violated"
        self.violation = {"round": round_index, "reason": reason}
        return self

    def to_json(self):
        def enc(t):
            return t.to_json() if hasattr(t, "to_json") else t
        return {"transform": self.name, "strategy": self.descriptor,
                "sources": [enc(t) for t in self.sources], "replay": enc(self.replay),
                "validation": self.validation, "violation": self.violation,
                "details": self.details}


def _order_key(x):
    try:
        return (0, float(x))
    except (TypeError, ValueError):
        return (1, repr(x))


def least_code(F) -> Any:
    return min(F, key=_order_key)


# ---------------------------------------------------------------- G1 from Gfin


def g1_from_gfin(tau_fin: Strategy, picker: Callable = least_code) -> Strategy:
    """Single-selection strategy picking one point of each finite selection."""
    if tau_fin.owner != P2:
        raise ValueError("expected a P2 strategy")

    def pick(F, n):
        F = list(F.elements if isinstance(F, FiniteSubset) else F)
        if not F:
            raise StrategyFault(n, "finite selection is empty")
        return picker(F)

    if tau_fin.kind == "markov":
        rule = lambda move, n: pick(tau_fin.rule(move, n), n)
    elif tau_fin.kind == "full":
        rule = lambda moves, sels: pick(tau_fin.rule(moves, _fin_history(tau_fin, moves)), len(moves))
    elif tau_fin.kind == "predetermined":
        rule = lambda n: pick(tau_fin.rule(n), n)
    else:
        rule = lambda: pick(tau_fin.rule(), 1)
    return Strategy(P2, tau_fin.kind, rule, f"single({tau_fin.label})")


def _fin_history(tau_fin, moves):
    """Finite selections ``tau_fin`` would have made on the earlier moves."""
    out = []
    for i in range(1, len(moves)):
        out.append(tau_fin.rule(moves[:i], list(out)))
    return out


def replay_g1_from_gfin(space: SpacePresentation, p1: Strategy, tau_fin: Strategy, horizon: int,
                        budget: int = 32, picker: Callable = least_code) -> TransformReport:
    fin = run(GameSpec(space, horizon, "finite", "cd", budget), p1, tau_fin)
    single = g1_from_gfin(tau_fin, picker)
    t = run(GameSpec(space, horizon, "single", "none", budget), p1, single)
    rep = TransformReport("g1_from_gfin", single.label, [fin], t)
    union = set(fin.selected_points())
    for n, x in enumerate(t.selections, 1):
        if x not in union:
            return rep.violate(n, "single selection outside the finite selections")
    if fin.verdict == P2_CERTIFIED:
        restricted = fin.result.certificate.restrict(t.selected_points())
        if not restricted.validate():
            return rep.violate(None, "restricted certificate fails")
        t.result = games.Adjudication(P2_CERTIFIED, restricted, ["restricted from the Gfin certificate"])
    else:
        t.result = adjudicate_cd(t, space, budget)
    rep.details["source_verdict"] = fin.verdict
    return rep


# ---------------------------------------------------------------- T1 injectivization


def _respond(tau: Strategy, moves: list, sels: list, n: int):
    if tau.kind == "markov":
        return tau.rule(moves[-1], n)
    if tau.kind == "full":
        return tau.rule(moves, sels)
    if tau.kind == "predetermined":
        return tau.rule(n)
    return tau.rule()


def injectivize_p2(tau: Strategy, space: SpacePresentation) -> Strategy:
    """``tilde tau(U_1..U_n) = tau(V_1..V_n)`` with ``V_{k+1} = U_{k+1}`` minus earlier picks.

    Needs a T1 space; a punctured move with no member left means the declared
    "every basic is infinite" premise fails, and is reported as a fault.
    """
    if tau.owner != P2:
        raise ValueError("expected a P2 strategy")
    if not space.is_T1:
        raise ValueError("injectivization needs a T1 space")

    def rule(moves, sels):
        vs = []
        picks: list = []
        for k, U in enumerate(moves, 1):
            V = punctured(U, picks) if picks else U
            if not any(True for _ in itertools.islice(V.members(), 1)):
                raise StrategyFault(k, "move exhausted by punctures (finite basic)")
            vs.append(V)
            if k < len(moves):
                picks.append(sels[k - 1])
        return _respond(tau, vs, list(sels), len(moves))

    return Strategy(P2, "full", rule, f"injective({tau.label})")


def deinjectivize_p1(sigma: Strategy, space: SpacePresentation) -> Strategy:
    """P1 plays ``sigma``'s move minus every earlier selection."""
    if sigma.owner != P1:
        raise ValueError("expected a P1 strategy")
    if not space.is_T1:
        raise ValueError("de-injectivization needs a T1 space")

    def rule(sels):
        n = len(sels) + 1
        U = sigma.move(n, [], list(sels))
        V = punctured(U, sels) if sels else U
        if not any(True for _ in itertools.islice(V.members(), 1)):
            raise StrategyFault(n, "move exhausted by punctures (finite basic)")
        return V

    return Strategy(P1, "full", rule, f"minus_history({sigma.label})")


def replay_injectivize(space: SpacePresentation, p1: Strategy, tau: Strategy, horizon: int,
                       budget: int = 32, probes: tuple = ()) -> TransformReport:
    src = run(GameSpec(space, horizon, "single", "cd", budget, probes), p1, tau)
    inj = injectivize_p2(tau, space)
    rep = TransformReport("injectivize_p2", inj.label, [src], None)
    try:
        t = run(GameSpec(space, horizon, "single", "cd", budget, probes), p1, inj)
    except StrategyFault as f:
        return rep.violate(f.round_index, f.reason)
    rep.replay = t
    seen = {}
    for n, x in enumerate(t.selections, 1):
        if x in seen:
            return rep.violate(n, f"repeats the selection of round {seen[x]}")
        seen[x] = n
    # a source that repeats itself is certified only because the horizon is finite
    degenerate = len(src.selected_points()) < len(src.selections)
    rep.details.update(source_verdict=src.verdict, replay_verdict=t.verdict,
                       source_degenerate=degenerate)
    if src.verdict == P2_CERTIFIED and not degenerate and t.verdict != P2_CERTIFIED:
        return rep.violate(None, "source certified but the injective replay is not")
    return rep


# ---------------------------------------------------------------- Pfin lift


def default_chooser(move) -> VietorisBasicOpen:
    """The least presented basic inside a move (a basic, or a tuple of basics)."""
    if isinstance(move, VietorisBasicOpen):
        return move
    if isinstance(move, tuple) and move:
        return move[0]
    raise ValueError(f"cannot choose a Vietoris basic inside {move!r}")


def _chosen(chooser, move, n):
    b = chooser(move)
    inside = b is move or (isinstance(move, tuple) and b in move) or b == move
    if not inside:
        raise StrategyFault(n, "chooser returned a basic not inside the move")
    return b


@dataclass
class LiftLog:
    calls: list = field(default_factory=list)  # (round n, block index j, beta(n, j))

    def round_trips(self) -> bool:
        return all(unpairing(b) == (n, j) and pairing(n, j) == b for n, j, b in self.calls)


def pfin_markov_lift(tau: Strategy, chooser: Callable = default_chooser) -> tuple[Strategy, LiftLog]:
    """``tilde tau(W, n) = {tau(U_j, beta(n, j)) : j <= m}`` for the chosen ``[U_1..U_m]`` in ``W``."""
    if tau.owner != P2 or tau.kind != "markov":
        raise ValueError("expected a P2 Markov strategy")
    log = LiftLog()

    def rule(W, n):
        b = _chosen(chooser, W, n)
        out = []
        for j, U in enumerate(b.opens, 1):
            beta = pairing(n, j)
            log.calls.append((n, j, beta))
            out.append(tau.rule(U.as_open(), beta))
        return FiniteSubset.of(out)

    return Strategy(P2, "markov", rule, f"pfin_lift({tau.label})"), log


def replay_pfin_lift(space: SpacePresentation, p1: Strategy, tau: Strategy, horizon: int,
                     budget: int = 32) -> TransformReport:
    lifted, log = pfin_markov_lift(tau)
    t = run(GameSpec(space, horizon, "single", "scd", budget), p1, lifted)
    rep = TransformReport("pfin_markov_lift", lifted.label, [], t,
                          details={"pairing_calls": len(log.calls), "verdict": t.verdict})
    if not log.round_trips():
        return rep.violate(None, "pairing bookkeeping does not round-trip")
    if t.verdict != P2_CERTIFIED:
        return rep.violate(None, f"no SCD certificate: {t.result.diagnostics[:3]}")
    return rep


def pfin_history_translate(strategy: Strategy, direction: str,
                           chooser: Callable = default_chooser) -> Strategy:
    """Translate full-information strategies between the hyperspace game and the ground game.

    ``P2``: a ground P2 strategy becomes a hyperspace P2 strategy answering
    ``[U_1..U_m]`` with the ground answers to ``U_1, ..., U_m`` in sequence.
    ``P1``: a hyperspace P1 strategy becomes a ground P1 strategy playing the
    opens of each chosen basic one at a time, regrouping ground selections.
    """
    if direction == "P2":
        if strategy.owner != P2:
            raise ValueError("expected a P2 strategy")

        def rule(hmoves, hsels):
            gmoves, gsels, last = [], [], []
            for n, W in enumerate(hmoves, 1):
                b = _chosen(chooser, W, n)
                last = []
                for U in b.opens:
                    gmoves.append(U.as_open())
                    x = _respond(strategy, gmoves, gsels, len(gmoves))
                    gsels.append(x)
                    last.append(x)
            return FiniteSubset.of(last)

        return Strategy(P2, "full", rule, f"translate_P2({strategy.label})")
    if direction == "P1":
        if strategy.owner != P1:
            raise ValueError("expected a P1 strategy")

        def rule(gsels):
            blocks = regroup(strategy, gsels, chooser)
            used = sum(m for _, _, m in blocks)
            hsels = [F for _, F, _ in blocks]
            b = _chosen(chooser, strategy.move(len(hsels) + 1, [], hsels), len(hsels) + 1)
            return b.opens[len(gsels) - used].as_open()

        return Strategy(P1, "full", rule, f"translate_P1({strategy.label})")
    raise ValueError("direction must be 'P1' or 'P2'")


def regroup(sigma: Strategy, gsels: Sequence, chooser: Callable = default_chooser) -> list:
    """Complete blocks ``(basic, F_j, size)`` read off a ground selection stream."""
    out, t = [], 0
    while True:
        hsels = [F for _, F, _ in out]
        b = _chosen(chooser, sigma.move(len(hsels) + 1, [], hsels), len(hsels) + 1)
        m = len(b.opens)
        if t + m > len(gsels):
            return out
        out.append((b, FiniteSubset.of(gsels[t:t + m]), m))
        t += m


# ---------------------------------------------------------------- divergence lift


def _separating_basic(space: SpacePresentation, bound: SeparationBound, e):
    if bound.kind == "coordinate":
        if bound.basic is None:
            raise ValueError("coordinate bound lacks a basic constructor")
        return bound.basic(bound.coordinate(e))
    if not isinstance(space, RealLine):
        raise ValueError("metric bounds need the real-line presentation")
    r = bound.epsilon / 2
    return ("iv", float(e) - r, float(e) + r)


@dataclass
class TailExclusion:
    target: FiniteSubset
    basic: Any  # PRBasicOpen or VietorisBasicOpen
    hits: list  # indices n with G_n in the basic


def hyper_divergence_lift(ground: Sequence, bound: SeparationBound, kind: str,
                          chooser: Callable[[int], Any], space: SpacePresentation,
                          probes: Optional[Iterable[FiniteSubset]] = None) -> TransformReport:
    """``G_n = F_{W_n} ∪ {x_n}`` and, for each probed target ``E``, a basic around ``E``
    containing ``G_n`` for at most ``#E`` indices (so a tail is excluded).

    ``chooser(n)`` returns ``F_W`` (a FiniteSubset), plus for the Pixley-Roy kind
    the ground open ``U_W`` the ground point must lie in.
    """
    if kind not in ("PR", "Vietoris"):
        raise ValueError("kind must be 'PR' or 'Vietoris'")
    pts = list(ground)
    bad = bound.check(pts)
    if bad is not None:
        raise ValueError(f"ground stream carries no separation certificate (pair {bad})")
    G = []
    for n, x in enumerate(pts, 1):
        c = chooser(n)
        F = c[0] if isinstance(c, tuple) else c
        if kind == "PR" and isinstance(c, tuple) and not c[1].contains(x):
            raise StrategyFault(n, "ground point outside U_W")
        G.append(FiniteSubset(F.elements | {x}))
    if probes is None:
        probes = list(dict.fromkeys(G + [FiniteSubset.of([x]) for x in pts]))
    certs, rep = [], TransformReport("hyper_divergence_lift", kind, [], G)
    for E in probes:
        keys = [_separating_basic(space, bound, e) for e in sorted(E.elements, key=repr)]
        if kind == "PR":
            b = PRBasicOpen(E, GroundOpen.union(space, keys))
            member = pr_member
        else:
            b = VietorisBasicOpen(tuple(GroundOpen.basic(space, k) for k in keys))
            member = vietoris_member
        if member(E, b) is False:
            return rep.violate(None, "target not inside its own basic")
        hits = [n for n, Gn in enumerate(G, 1) if member(Gn, b)]
        if len(hits) > len(E):
            return rep.violate(hits[-1], f"{len(hits)} members inside the basic around a {len(E)}-set")
        certs.append(TailExclusion(E, b, hits))
    rep.details["exclusions"] = [{"target": e.target.to_json(space), "basic": e.basic.to_json(),
                                  "hits": e.hits} for e in certs]
    rep.details["certificates"] = certs
    return rep


# ---------------------------------------------------------------- nowhere-separable selector


def pr_nowhere_separable_selector(moves: Sequence[PRBasicOpen], avoider: Callable,
                                  space: SpacePresentation, budget: int = 64,
                                  probes: Optional[Iterable[FiniteSubset]] = None) -> TransformReport:
    """``G_n = F_n ∪ {x_n}`` with ``x_n`` in ``U_n`` outside the closure of every ``F_k``.

    ``avoider(U_n, F_points, n)`` supplies ``x_n``; each point is validated
    (inside ``U_n``, outside every ``F_k``, fresh). The certificate follows the
    case analysis: separators ``[G_n, V_n ∪ (X minus {x_k})]`` and, for probed
    non-members ``E``, an open ``W`` with ``[E, W]`` missing the family.
    """
    Fpts = frozenset().union(*(m.F.elements for m in moves))
    xs: list = []
    for n, m in enumerate(moves, 1):
        if m.empty:
            raise StrategyFault(n, "empty Pixley-Roy move")
        x = avoider(m.U, Fpts, n)
        if not m.U.contains(x):
            raise StrategyFault(n, "avoider returned a point outside U_n")
        if x in Fpts:
            raise StrategyFault(n, "avoider returned a point of the closure of the F_k")
        if x in xs:
            raise StrategyFault(n, "avoider repeated a point")
        xs.append(x)
    G = [FiniteSubset(m.F.elements | {x}) for m, x in zip(moves, xs)]
    rep = TransformReport("pr_nowhere_separable_selector", "G_n = F_n + x_n", [], G)
    # V_n: meets {x_k} only in x_n and misses the F points
    V = []
    for n, x in enumerate(xs, 1):
        avoid = [y for y in xs if y != x] + list(Fpts)
        key = next((k for k in itertools.islice(space.neighborhoods(x), budget)
                    if not any(space.contains(k, y) for y in avoid)), None)
        if key is None:
            raise StrategyFault(n, "no separating basic for x_n within budget (source not CD)")
        V.append(key)
    xset = frozenset(xs)
    seps = [PRBasicOpen(Gn, GroundOpen.union_avoid(space, [V[i]], xset)) for i, Gn in enumerate(G)]
    fam = list(dict.fromkeys(G))
    if len(fam) != len(G):
        return rep.violate(None, "family has repeated members")
    if probes is None:
        probes = _selector_probes(G, moves, xs)
    probe_pairs = []
    for E in probes:
        if E in set(G):
            continue
        W = _selector_probe_open(E, G, xs, V, space, budget)
        if W is None:
            return rep.violate(None, f"no closedness witness for probe {E.to_json(space)}")
        probe_pairs.append((E, PRBasicOpen(E, W)))
    cert = HyperCDCertificate(space, "pixley_roy", G, seps, probe_pairs)
    bad = cert.violations()
    if bad:
        return rep.violate(None, "; ".join(bad[:3]))
    rep.details["certificate"] = cert
    rep.details["points"] = xs
    return rep


def _selector_probes(G, moves, xs):
    out = []
    for i, Gn in enumerate(G):
        out.append(moves[i].F)
        out.append(FiniteSubset.of([xs[i]]))
        if i + 1 < len(G):
            out.append(FiniteSubset(Gn.elements | {xs[i + 1]}))
            out.append(FiniteSubset.of([xs[i], xs[i + 1]]))
            out.append(FiniteSubset(moves[i].F.elements | {xs[i + 1]}))
    return list(dict.fromkeys(out))


def _selector_probe_open(E, G, xs, V, space, budget) -> Optional[GroundOpen]:
    lam = [n for n, x in enumerate(xs) if x in E.elements]
    xset = frozenset(xs)
    if not lam:
        return GroundOpen.avoid(space, xset)
    keys = [V[n] for n in lam]
    rest = [y for y in E.elements if y not in xset]
    if not rest:
        return GroundOpen.union(space, keys)
    around = set(E.elements).union(*(G[n].elements for n in range(max(lam) + 1)))
    for y in rest:
        k = next((k for k in itertools.islice(space.neighborhoods(y), budget)
                  if not any(space.contains(k, z) for z in around if z != y)), None)
        if k is None:
            return None
        keys.append(k)
    return GroundOpen.union(space, keys)


# ---------------------------------------------------------------- constant-strategy induction


def default_cd_stream(space: SpacePresentation) -> Callable[[OpenSet, int], list]:
    """``length`` points of an open forming a CD set (fresh members / escape values)."""
    if isinstance(space, ZProduct):
        tau = games.zk_markov_strategy(space)
        return lambda U, length: [tau.rule(U, n) for n in range(1, length + 1)]
    return lambda U, length: list(itertools.islice(U.members(), length))


def scd_family_for_basic(b: VietorisBasicOpen, space: SpacePresentation, length: int,
                         cd_stream: Optional[Callable] = None) -> list[FiniteSubset]:
    """A family inside ``[U_1..U_k]`` built by the induction on ``k``.

    If ``U_{k+1}`` meets some ``U_j`` the last open is folded into ``U_j``;
    otherwise a CD stream from ``U_{k+1}`` is appended pointwise.
    """
    stream = cd_stream or default_cd_stream(space)
    keys = []
    for o in b.opens:
        if o.kind != "union" or len(o.basics) != 1:
            raise ValueError("the induction works on basics")
        keys.append(o.basics[0])

    def build(ks):
        if len(ks) == 1:
            return [FiniteSubset.of([x]) for x in stream(BasicOpen(space, ks[0]), length)]
        last = ks[-1]
        for j, kj in enumerate(ks[:-1]):
            inter = space.intersect(last, kj)
            if inter is not None:
                return build(ks[:j] + [inter] + ks[j + 1:-1])
        xs = stream(BasicOpen(space, last), length)
        return [FiniteSubset(Gn.elements | {x}) for Gn, x in zip(build(ks[:-1]), xs)]

    return build(keys)
