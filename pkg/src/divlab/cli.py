"""Command-line front door: density, semigroup, converge, game, transform, reproduce-all.

Every JSON report carries ``"schema": "divergence-lab/1"``. Exit codes: 0 when all
checks are consistent, 1 on a refutation or strategy fault, 2 on a config error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import density, divergence, games, hyperspaces, seqmap, spaces, transforms
from .games import P1, P2, P1_CERTIFIED, P2_CERTIFIED, GameSpec, Strategy, StrategyFault

SCHEMA = "divergence-lab/1"
EXIT_OK, EXIT_REFUTED, EXIT_CONFIG = 0, 1, 2

REQUIRED = {
    "density": ("map", "alpha", "horizon"),
    "semigroup": ("phi", "psi", "alpha", "horizon"),
    "converge": ("seq", "x", "alpha", "horizon"),
    "game": ("space", "p1", "p2", "horizon"),
    "transform": ("name", "space", "horizon"),
    "reproduce-all": (),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    json_path: Optional[str] = None
    csv_path: Optional[str] = None

    def validate(self):
        if self.command not in REQUIRED:
            raise ConfigError(f"unknown command {self.command!r}")
        missing = [k for k in REQUIRED[self.command] if self.params.get(k) is None]
        if missing:
            raise ConfigError(f"{self.command}: missing parameters {missing}")
        h = self.params.get("horizon")
        if h is not None and int(h) < 1:
            raise ConfigError("horizon must be at least 1")
        a = self.params.get("alpha")
        if a is not None and not (0 < float(a) <= 1):
            raise ConfigError(f"alpha must lie in (0, 1], got {a}")
        return self


def horizon_cap(h: int) -> int:
    """Apply ``DIVLAB_HORIZON_CAP`` when set."""
    cap = os.environ.get("DIVLAB_HORIZON_CAP")
    if cap:
        try:
            return max(1, min(int(h), int(cap)))
        except ValueError as exc:
            raise ConfigError(f"DIVLAB_HORIZON_CAP must be an integer, got {cap!r}") from exc
    return int(h)


def seeded(seed, name: str) -> random.Random:
    """Independent stream ``name`` split off a single seed."""
    return random.Random(f"{seed}/{name}")


# ---------------------------------------------------------------- labels


def parse_map(label: str) -> seqmap.MonotoneMap:
    try:
        return seqmap.parse_label(label)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_sequence(label: str) -> divergence.Seq:
    """``squares-exception``, ``swapped``, ``reciprocals``, ``naturals``, ``const:c``, ``weave:c``."""
    name, _, arg = label.partition(":")
    if name == "squares-exception":
        return divergence.squares_exception()
    if name == "swapped":
        return divergence.swapped(divergence.squares_exception())
    if name == "reciprocals":
        return divergence.reciprocals()
    if name == "naturals":
        return divergence.naturals()
    try:
        if name == "const":
            return divergence.constant(float(arg))
        if name == "weave":
            return divergence.weave(divergence.naturals(), float(arg or 0))
    except ValueError as exc:
        raise ConfigError(f"bad sequence argument in {label!r}") from exc
    raise ConfigError(f"unknown sequence {label!r}")


def parse_space(label: str) -> spaces.SpacePresentation:
    if label not in ("discreteN", "rationals", "zprod"):
        raise ConfigError(f"unknown game space {label!r} (discreteN, rationals, zprod)")
    return spaces.builtin_space(label)


def _interval(space, a, b):
    return spaces.BasicOpen(space, ("iv", Fraction(a), Fraction(b)))


def make_p1(label: str, space, seed) -> Strategy:
    """``whole``, ``pi-base`` (rationals, at 0), ``cylinders`` (zprod), ``interval:a,b``,
    ``moving`` (rationals ``(n, n+1)``), ``punctured`` (discreteN, seeded finite holes)."""
    name, _, arg = label.partition(":")
    if name == "whole":
        return games.constant_p1(spaces.BasicOpen(space, space.whole()), "whole")
    if name == "pi-base":
        if not isinstance(space, spaces.Rationals):
            raise ConfigError("pi-base attack is set up on the rationals")
        return games.pi_base_attack(space, Fraction(0))
    if name == "cylinders":
        if not isinstance(space, spaces.ZProduct):
            raise ConfigError("cylinders need the zprod space")
        return games.random_cylinder_p1(space, seed)
    if name == "interval":
        a, b = (Fraction(x) for x in arg.split(","))
        return games.constant_p1(_interval(space, a, b), f"interval:{arg}")
    if name == "moving":
        return games.predetermined_p1(lambda n: _interval(space, n, n + 1), "moving")
    if name == "punctured":
        whole = spaces.BasicOpen(space, space.whole())

        def rule(n):
            rng = seeded(seed, f"holes/{n}")
            return spaces.punctured(whole, rng.sample(range(3 * n + 5), rng.randint(0, n)))
        return games.predetermined_p1(rule, f"punctured:{seed}")
    raise ConfigError(f"unknown P1 strategy {label!r}")


def make_p2(label: str, space, seed) -> Strategy:
    """``least``, ``nth:k``, ``seeded``, ``zk-markov``, ``irrational:d``."""
    name, _, arg = label.partition(":")
    try:
        if name == "least":
            return games.least_p2()
        if name == "nth":
            return games.nth_member_p2(int(arg or 0))
        if name == "seeded":
            return games.seeded_member_p2(int(seed))
        if name == "zk-markov":
            return games.zk_markov_strategy(space)
        if name == "irrational":
            return games.irrational_target_p2(int(arg or 2))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown P2 strategy {label!r}")


# ---------------------------------------------------------------- commands


def _density_report(p):
    phi = parse_map(p["map"])
    alpha, horizon = float(p["alpha"]), horizon_cap(p["horizon"])
    tol = float(p.get("tolerance") or 0.05)
    target = seqmap.Complement(phi) if p.get("complement") else phi
    est = density.estimate_delta_alpha(target, alpha, horizon, tol)
    ns, rs = density.ratio_table(target, alpha, horizon)
    rep = {"command": "density", "set": getattr(target, "label", p["map"]), "alpha": alpha,
           "horizon": horizon, "estimate": est.to_json()}
    return rep, EXIT_OK, [(int(n), float(r)) for n, r in zip(ns, rs)]


def _semigroup_report(p):
    phi, psi = parse_map(p["phi"]), parse_map(p["psi"])
    alpha, horizon = float(p["alpha"]), horizon_cap(p["horizon"])
    tol = float(p.get("tolerance") or 0.05)
    try:
        r = density.verify_subsemigroup(phi, psi, alpha, horizon, tol)
    except ValueError as exc:
        raise ConfigError(f"precondition failed: {exc}") from exc
    rep = {"command": "semigroup", "composite": r.composite_label, "alpha": alpha,
           "horizon": horizon, "claim": r.verdict.claim, "estimate": r.verdict.evidence.to_json(),
           "consistent": r.consistent}
    return rep, EXIT_OK if r.consistent else EXIT_REFUTED, None


def _converge_report(p):
    s = parse_sequence(p["seq"])
    x, alpha, horizon = float(p["x"]), float(p["alpha"]), horizon_cap(p["horizon"])
    mode = p.get("mode") or "statistical"
    if mode == "statistical":
        v = divergence.statistically_converges(s, x, alpha, horizon)
        rep = {"command": "converge", "mode": mode, "sequence": s.label, "x": x, **v.to_json()}
        code = EXIT_REFUTED if v.claim == spaces.CERTIFIED_NO else EXIT_OK
    elif mode == "sstar":
        cands = [parse_map(m) for m in (p.get("maps") or "nonpowers:2").split(";")]
        v = divergence.s_star_converges_search(s, x, alpha, cands, min(horizon, 10_000))
        rep = {"command": "converge", "mode": mode, "sequence": s.label, "x": x, **v.to_json()}
        code = EXIT_OK if v.claim == spaces.TENTATIVELY_YES else EXIT_REFUTED
    else:
        raise ConfigError(f"unknown converge mode {mode!r}")
    return rep, code, None


def _game_report(p):
    space = parse_space(p["space"])
    seed = p.get("seed") or 0
    p1, p2 = make_p1(p["p1"], space, seed), make_p2(p["p2"], space, seed)
    spec = GameSpec(space, horizon_cap(p["horizon"]), "single", "cd", int(p.get("budget") or 32))
    try:
        t = games.run(spec, p1, p2)
    except StrategyFault as f:
        return {"command": "game", "fault": {"round": f.round_index, "reason": f.reason}}, EXIT_REFUTED, None
    rep = {"command": "game", "p1": p1.label, "p2": p2.label, "transcript": t.to_json()}
    return rep, EXIT_REFUTED if t.verdict == P1_CERTIFIED else EXIT_OK, None


TRANSFORMS = ("g1-from-gfin", "injectivize", "pfin-lift", "divergence-lift", "nowhere-separable")


def run_transform(name: str, space, horizon: int, seed) -> transforms.TransformReport:
    G = hyperspaces.GroundOpen
    if name == "g1-from-gfin":
        block = Strategy(P2, "markov", lambda U, n: hyperspaces.FiniteSubset.of(
            [x for _, x in zip(range(2), U.members())]), "first_two")
        return transforms.replay_g1_from_gfin(space, make_p1(_default_p1(space), space, seed),
                                              block, horizon)
    if name == "injectivize":
        return transforms.replay_injectivize(space, make_p1(_default_p1(space), space, seed),
                                             games.least_p2(), horizon)
    if name == "pfin-lift":
        tau = (games.zk_markov_strategy(space) if isinstance(space, spaces.ZProduct)
               else games.nth_member_p2(0))
        return transforms.replay_pfin_lift(space, vietoris_p1(space, seed), tau, horizon)
    if name == "divergence-lift":
        if isinstance(space, spaces.ZProduct):
            pts = [spaces.ZPoint.of({0: n}) for n in range(1, horizon + 1)]
            bound, F = divergence.zk_coordinate_bound(0), spaces.ZPoint.of({1: 1})
        elif isinstance(space, spaces.DiscreteNaturals):
            pts, bound, F = list(range(1, horizon + 1)), divergence.discrete_bound(), 0
        else:
            raise ConfigError("divergence-lift runs on discreteN or zprod")
        return transforms.hyper_divergence_lift(
            pts, bound, "PR", lambda n: (hyperspaces.FiniteSubset.of([F]), G.whole(space)), space)
    if name == "nowhere-separable":
        if not isinstance(space, spaces.ZProduct):
            raise ConfigError("nowhere-separable runs on zprod")
        moves = [hyperspaces.PRBasicOpen(hyperspaces.FiniteSubset.of([spaces.ZPoint.of({n % 5: n})]),
                                         G.whole(space)) for n in range(1, horizon + 1)]
        return transforms.pr_nowhere_separable_selector(moves, zk_avoider, space)
    raise ConfigError(f"unknown transform {name!r} ({', '.join(TRANSFORMS)})")


def _default_p1(space) -> str:
    return "interval:0,1" if isinstance(space, spaces.Rationals) else "whole"


def zk_avoider(U, F, n, coordinate: int = 20):
    """Fresh value ``1000 + n`` at a coordinate no move mentions."""
    base = dict(U.basics[0][1]) if U.kind == "union" and U.basics[0][0] == "cyl" else {}
    base[coordinate] = 1000 + n
    return spaces.ZPoint.of(base)


def vietoris_p1(space, seed, max_opens: int = 3) -> Strategy:
    """Predetermined P1 playing seeded Vietoris basics of ground basics."""
    G = hyperspaces.GroundOpen

    def rule(n):
        rng = seeded(seed, f"vietoris/{n}")
        opens = []
        for _ in range(rng.randint(1, max_opens)):
            if isinstance(space, spaces.ZProduct):
                F = rng.sample(range(6), rng.randint(0, 2))
                f = spaces.ZPoint.of({k: rng.randint(-3, 3) for k in F})
                opens.append(G.basic(space, space.cylinder(f, F) if F else space.whole()))
            else:
                opens.append(G.basic(space, space.whole()))
        return hyperspaces.VietorisBasicOpen(tuple(opens))

    return Strategy(P1, "predetermined", rule, f"vietoris:{seed}")


def _transform_report(p):
    space = parse_space(p["space"])
    try:
        r = run_transform(p["name"], space, horizon_cap(p["horizon"]), p.get("seed") or 0)
    except StrategyFault as f:
        return {"command": "transform", "fault": {"round": f.round_index, "reason": f.reason}}, EXIT_REFUTED, None
    out = r.to_json()
    out["details"] = {k: v for k, v in out["details"].items() if k not in ("certificates", "certificate")}
    if "points" in out["details"]:
        out["details"]["points"] = [space.encode(x) for x in out["details"]["points"]]
    if isinstance(out["replay"], list):
        out["replay"] = [F.to_json(space) for F in out["replay"]]
    return {"command": "transform", **out}, EXIT_OK if r.sound else EXIT_REFUTED, None


# ---------------------------------------------------------------- reproduce-all


@dataclass
class Example:
    anchor: str
    check: Callable[[], tuple]  # () -> (ok, detail)


def _ex_compose_square():
    phi = seqmap.power(2)
    comp = seqmap.compose(phi, phi)
    return all(comp(n) == n**4 for n in range(1, 101)), "n <= 100"


def _ex_complement_count():
    phi = seqmap.power(2)
    ok = all(len(seqmap.complement_prefix(phi, n * n)) == n * n - n for n in range(1, 60))
    return ok, "n < 60"


def _ex_cofinite_formula():
    w = seqmap.cofinite_compose_law(seqmap.CofiniteWitness(2, 4), seqmap.CofiniteWitness(3, 7))
    return (w.pivot, w.base) == (5, 11), f"({w.pivot},{w.base})"


def _ex_power_values():
    return seqmap.power(2).prefix(4) == [1, 4, 9, 16], "1,4,9,16"


def _density_check(label, alpha, kind, value=None, tol=0.05, complement=False):
    def check():
        phi = parse_map(label)
        target = seqmap.Complement(phi) if complement else phi
        est = density.estimate_delta_alpha(target, alpha, 10**6, tol)
        ok = est.kind == kind and (value is None or abs(est.value - value) <= tol)
        return ok, f"{est.kind} {est.value if est.value is not None else ''}".strip()
    return check


def _ex_density_quartet_third():
    a, da = _density_check("power:2", 1 / 3, density.INFINITE)()
    b, db = _density_check("power:4", 1 / 3, density.FINITE, 0.0, 0.01)()
    return a and b, f"squares {da}; fourth powers {db}"


def _ex_evens_odds():
    a, da = _density_check("affine:2,0", 0.5, density.INFINITE)()
    b, db = _density_check("affine:2,0", 0.5, density.INFINITE, complement=True)()
    return a and b, f"evens {da}; odds {db}"


def _ex_product_6n():
    d6 = density.delta_of_map(seqmap.affine(6), 10**6)
    d2, d3 = density.delta_of_map(seqmap.affine(2), 10**6), density.delta_of_map(seqmap.affine(3), 10**6)
    ok = abs(d6.value - 1 / 6) <= 0.02 and abs(d6.value - d2.value * d3.value) <= 0.02
    return ok, f"{d6.value:.4f}"


def _ex_initial_bounding():
    r = density.check_initial_bounding(seqmap.power(2), 0.5, 1.0, 10**6)
    return r.premise_holds and r.conclusion_holds, f"B={r.bound:.3f}, delta_1={r.beta_estimate.value}"


def _ex_zk_membership():
    Z = spaces.ZProduct()
    f = spaces.ZPoint.of({3: 7})
    key = Z.cylinder(f, [3])
    ok = Z.contains(key, spaces.ZPoint.of({3: 7, 9: 1})) and not Z.contains(key, spaces.ZPoint.of({3: 6}))
    return ok, "[f;{3}]"


def _zk_game(horizon=50, seed=0):
    Z = spaces.ZProduct()
    t = games.run(GameSpec(Z, horizon, "single", "cd"), games.random_cylinder_p1(Z, seed),
                  games.zk_markov_strategy(Z))
    return Z, t


def _ex_zk_certificate():
    Z, t = _zk_game()
    hits = max(games.escape_hits(t.selections, h, 8) for h in t.selections)
    return hits <= 1 and t.verdict == P2_CERTIFIED, f"max hits {hits}, {t.verdict}"


def _ex_zk_bound():
    Z, t = _zk_game()
    v = divergence.sds_certificate_by_separation(t.selections, divergence.zk_coordinate_bound(8))
    return v.claim == divergence.CERTIFIED, v.claim


def _ex_weave():
    s = divergence.weave(divergence.naturals(), 0)
    inner = divergence.divergence_inner(divergence.discrete_bound(), 2000)
    w = divergence.in_w_class(s, divergence.family_sampler("S"), inner)
    sep = divergence.sds_certificate_by_separation(s.prefix(2000), divergence.discrete_bound())
    return w.claim == divergence.CERTIFIED and sep.claim == divergence.REFUTED, \
        f"wSD via {w.witness['map'].label if w.witness else None}; separation {sep.claim}"


def _ex_stat_original():
    v = divergence.statistically_converges(divergence.squares_exception(), 0.0, 1.0, 10**6)
    return v.claim == spaces.TENTATIVELY_YES, f"{v.claim}, fraction {v.exception_fractions[1.0]:.4f}"


def _ex_stat_swapped():
    v = divergence.statistically_converges(divergence.swapped(divergence.squares_exception()), 0.0, 1.0, 10**6)
    return v.claim == spaces.CERTIFIED_NO, f"{v.claim}, fraction {v.exception_fractions[1.0]:.4f}"


def _ex_sstar():
    v = divergence.s_star_converges_search(divergence.squares_exception(), 0.0, 1.0, [seqmap.nonpowers(2)])
    return v.claim == spaces.TENTATIVELY_YES, v.witness.label if v.witness else "none"


def _ex_pi_base():
    Q = spaces.Rationals()
    t = games.run(GameSpec(Q, 50, "single", "cd"), games.pi_base_attack(Q, Fraction(0)),
                  games.seeded_member_p2(0))
    ok = all(0 < abs(y) < Fraction(1, n) for n, y in enumerate(t.selections, 1))
    point = t.result.certificate.point if t.verdict == P1_CERTIFIED else None
    return ok and point == 0, f"{t.verdict} at {point}"


def _ex_escape_value():
    Z = spaces.ZProduct()
    tau = games.zk_markov_strategy(Z)
    f = spaces.ZPoint.of({0: 3, 1: -2})
    ok = all(tau.rule(spaces.BasicOpen(Z, Z.cylinder(f, [0, 1])), n)(7) == n for n in range(1, 40))
    return ok, "coordinate 7"


def _ex_cli_density():
    rep, code, _ = _density_report({"map": "power:2", "alpha": 0.5, "horizon": 10**6})
    return code == EXIT_OK and abs(rep["estimate"]["value"] - 1.0) <= 0.05, str(rep["estimate"]["value"])


def _ex_cofinite_tail_law():
    rng = seeded(0, "cofinite")
    for _ in range(50):
        a, b = seqmap.random_cofinite(rng), seqmap.random_cofinite(rng)
        wa, wb = seqmap.cofinite_witness(a, 200), seqmap.cofinite_witness(b, 200)
        seqmap.cofinite_compose_law(wa, wb, a, b, probe=1000)
    return True, "50 pairs, k <= 1000"


EXAMPLES = [
    Example("φ∘φ(n) = n⁴", _ex_compose_square),
    Example("complement count φ(n) − n", _ex_complement_count),
    Example("cofinite witness φ(ψ(n_φ+n_ψ+k))", _ex_cofinite_formula),
    Example("φ(n) = n²", _ex_power_values),
    Example("δ_{1/2}(φ) = 1", _density_check("power:2", 0.5, density.FINITE, 1.0)),
    Example("δ_{1/2}(φ∘φ) = 0", _density_check("power:4", 0.5, density.FINITE, 0.0, 0.01)),
    Example("δ_{1/3}(φ) = ∞", _ex_density_quartet_third),
    Example("δ_{1/2}(C_φ) = ∞", _ex_evens_odds),
    Example("D_α ∘ D_β ⊆ D_{αβ}", _ex_product_6n),
    Example("δ_β(φ) = 0", _ex_initial_bounding),
    Example("g ↾_F = f ↾_F", _ex_zk_membership),
    Example("#{ n ∈ ℕ : τ(...) ∈ [h; {x}] } ≤ 1", _ex_zk_certificate),
    Example("τ(f_n,F_n,n)(x) = n, basis-form bound", _ex_zk_bound),
    Example("weave a constant sequence in with s", _ex_weave),
    Example("s statistically converges to 0", _ex_stat_original),
    Example("δ({n ∈ ℕ : s∘φ(n) ∉ (−1,1)}) = 1", _ex_stat_swapped),
    Example("s s*-converges to 0", _ex_sstar),
    Example("x ∈ cl_X{y_n : n ∈ ℕ}", _ex_pi_base),
    Example("τ(f_n,F_n,n)(x) = n", _ex_escape_value),
    Example("density --map power:2 --alpha 0.5 → δ_{1/2}(φ) = 1", _ex_cli_density),
    Example("cofinite tail law", _ex_cofinite_tail_law),
]


def reproduce_all(stream=None) -> tuple[dict, int]:
    stream = stream or sys.stdout
    rows, failed = [], 0
    for ex in EXAMPLES:
        try:
            ok, detail = ex.check()
        except Exception as exc:  # a crash is a failed example, reported in line
            ok, detail = False, f"error: {exc}"
        failed += not ok
        rows.append({"anchor": ex.anchor, "pass": bool(ok), "detail": detail})
        print(f"{'PASS' if ok else 'FAIL'}  {ex.anchor}  [{detail}]", file=stream)
    rep = {"command": "reproduce-all", "examples": rows, "failed": failed}
    return rep, EXIT_OK if failed == 0 else EXIT_REFUTED


# ---------------------------------------------------------------- driver


HANDLERS = {
    "density": _density_report,
    "semigroup": _semigroup_report,
    "converge": _converge_report,
    "game": _game_report,
    "transform": _transform_report,
}


def run_experiment(config: ExperimentConfig, stream=None) -> tuple[int, Optional[dict]]:
    stream = stream or sys.stdout
    try:
        config.validate()
        if config.command == "reproduce-all":
            rep, code = reproduce_all(stream)
            rows = None
            if config.json_path is None:
                return code, {"schema": SCHEMA, "exit": code, **rep}
        else:
            rep, code, rows = HANDLERS[config.command](config.params)
    except ConfigError as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG, None
    report = {"schema": SCHEMA, "exit": code, **rep}
    text = json.dumps(report, indent=2, sort_keys=False, default=_default)
    if config.json_path:
        with open(config.json_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stream)
    if config.csv_path and rows is not None:
        with open(config.csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "ratio"])
            w.writerows(rows)
    return code, report


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.generic):
        return o.item()
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    return repr(o)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="divlab",
        description="Divergence lab: density estimates, convergence checks, selection games.",
        epilog="Exit codes: 0 consistent, 1 refutation or fault, 2 config error. "
               "DIVLAB_HORIZON_CAP bounds every horizon.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, csv_help=None):
        p.add_argument("--json", dest="json_path", help="write the JSON report here")
        if csv_help:
            p.add_argument("--csv", dest="csv_path", help=csv_help)
        return p

    d = common(sub.add_parser("density", help="windowed alpha-density estimate"),
               "write the sampled ratios; columns: n, ratio = #(A ∩ [1,n]) / n^alpha")
    d.add_argument("--map", required=True, help="map label, e.g. power:2, affine:2,0, skip:{2,5}")
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--horizon", type=int, default=10**6)
    d.add_argument("--tolerance", type=float, default=0.05)
    d.add_argument("--complement", action="store_true", help="estimate the complement of the range")

    s = common(sub.add_parser("semigroup", help="density verdict for a composition of dense maps"))
    s.add_argument("--phi", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--horizon", type=int, default=10**6)
    s.add_argument("--tolerance", type=float, default=0.05)

    c = common(sub.add_parser("converge", help="statistical or s* convergence check"))
    c.add_argument("--seq", required=True,
                   help="squares-exception, swapped, reciprocals, naturals, const:c, weave:c")
    c.add_argument("--x", type=float, default=0.0)
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--horizon", type=int, default=10**6)
    c.add_argument("--mode", choices=("statistical", "sstar"), default="statistical")
    c.add_argument("--maps", help="';'-separated candidate maps for --mode sstar")

    g = common(sub.add_parser("game", help="play and adjudicate a selection game"))
    g.add_argument("--space", required=True, help="discreteN, rationals, zprod")
    g.add_argument("--p1", required=True,
                   help="whole, pi-base, cylinders, interval:a,b, moving, punctured")
    g.add_argument("--p2", required=True, help="least, nth:k, seeded, zk-markov, irrational:d")
    g.add_argument("--horizon", type=int, default=50)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", type=int, default=32)

    t = common(sub.add_parser("transform", help="build a transformed strategy and replay it"))
    t.add_argument("--name", required=True, choices=TRANSFORMS)
    t.add_argument("--space", required=True)
    t.add_argument("--horizon", type=int, default=30)
    t.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("reproduce-all", help="run every worked example, one line each"))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "json_path", "csv_path")}
    cfg = ExperimentConfig(ns.command, params, ns.json_path, getattr(ns, "csv_path", None))
    t0 = time.perf_counter()
    code, _ = run_experiment(cfg)
    if ns.command == "reproduce-all":
        print(f"reproduce-all finished in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
