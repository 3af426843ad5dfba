"""Acceptance gate: twelve criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for the bare report.
"""
import itertools
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from generators import (divergence_corpus, group_instance, injective_replays, lift_instance,  # noqa: E402
                        pi_base_p2s, rng_for)
from divlab import density, divergence as D, games, hyperspaces as H, seqmap, spaces, transforms  # noqa: E402
from divlab.games import P1_CERTIFIED, P2_CERTIFIED, GameSpec  # noqa: E402

H6 = 10**6
RESULTS = {}


def report(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail})"
    RESULTS[num] = line
    print(line)
    return ok


# ---------------------------------------------------------------- criteria


def criterion_1():
    t0 = time.perf_counter()
    sq, p4 = seqmap.power(2), seqmap.power(4)
    evens = seqmap.affine(2, 0)
    e = {
        "sq@1/2": density.estimate_delta_alpha(sq, 0.5, H6, 0.05),
        "p4@1/2": density.estimate_delta_alpha(p4, 0.5, H6, 0.01),
        "sq@1/3": density.estimate_delta_alpha(sq, 1 / 3, H6, 0.05),
        "p4@1/3": density.estimate_delta_alpha(p4, 1 / 3, H6, 0.01),
        "evens@1/2": density.estimate_delta_alpha(evens, 0.5, H6, 0.05),
        "odds@1/2": density.estimate_delta_alpha(seqmap.Complement(evens), 0.5, H6, 0.05),
    }
    elapsed = time.perf_counter() - t0
    ok = (e["sq@1/2"].kind == "finite" and abs(e["sq@1/2"].value - 1) <= 0.05
          and e["p4@1/2"].kind == "finite" and abs(e["p4@1/2"].value) <= 0.01
          and e["sq@1/3"].kind == "infinite"
          and e["p4@1/3"].kind == "finite" and abs(e["p4@1/3"].value) <= 0.01
          and e["evens@1/2"].kind == "infinite" and e["odds@1/2"].kind == "infinite"
          and elapsed < 5.0)
    detail = ", ".join(f"{k}={v.kind}" + (f" {v.value:.4f}" if v.value is not None else "")
                       for k, v in e.items())
    return report(1, "alpha-density quartet", ok, f"{detail}; {elapsed:.2f}s")


def dense_pairs(alpha, count=20, seed=0):
    """``count`` seeded pairs drawn from catalog maps with a dense verdict at ``alpha``."""
    pool = list(itertools.islice(D.family_sampler("D_alpha", alpha, H6), 16))
    rng = rng_for(seed, f"pairs/{alpha}")
    return [(rng.choice(pool), rng.choice(pool)) for _ in range(count)]


def criterion_2():
    worst, n = 0.0, 0
    ok = True
    for alpha in (0.5, 0.75, 1.0):
        for phi, psi in dense_pairs(alpha):
            r = density.verify_subsemigroup(phi, psi, alpha, H6)
            est = r.verdict.evidence
            n += 1
            if est.kind != "finite" or est.value > 0.05:
                ok = False
            else:
                worst = max(worst, est.value)
    return report(2, "dense maps compose to dense maps", ok, f"{n} pairs, worst complement {worst:.4f}")


def criterion_3():
    rng = rng_for(0, "cofinite")
    ks = list(range(0, 1001))
    for _ in range(50):
        a, b = seqmap.random_cofinite(rng), seqmap.random_cofinite(rng)
        wa, wb = seqmap.cofinite_witness(a, 200), seqmap.cofinite_witness(b, 200)
        w = seqmap.cofinite_compose_law(wa, wb)
        comp = seqmap.compose(a, b)
        if any(comp(w.pivot + k) != w.base + k for k in ks):
            return report(3, "cofinite tail law", False, f"{a.label} with {b.label}")
    return report(3, "cofinite tail law", True, "50 pairs exact for k <= 1000")


def criterion_4():
    worst = 0.0
    for a, b in itertools.product((2, 3, 5), repeat=2):
        fa, fb = seqmap.affine(a), seqmap.affine(b)
        dc = density.delta_of_map(seqmap.compose(fa, fb), H6).value
        prod = density.delta_of_map(fa, H6).value * density.delta_of_map(fb, H6).value
        worst = max(worst, abs(dc - prod))
    return report(4, "density product law", worst <= 0.02, f"max gap {worst:.2e}")


def criterion_5():
    s = D.squares_exception()
    orig = D.statistically_converges(s, 0.0, 1.0, H6).exception_fractions[1.0]
    swap = D.statistically_converges(D.swapped(s), 0.0, 1.0, H6).exception_fractions[1.0]
    star = D.s_star_converges_search(s, 0.0, 1.0, [seqmap.nonpowers(2)])
    ok = orig <= 0.002 and swap >= 0.49 and star.claim == spaces.TENTATIVELY_YES
    return report(5, "statistical convergence pair", ok,
                  f"original {orig:.4f}, swapped {swap:.4f}, s* {star.claim}")


GROUP_CERTS = []


def criterion_6():
    GROUP_CERTS.clear()
    bad = 0
    for seed in range(100):
        space, prefix, cert, phi = group_instance(seed)
        gf = H.group_cd(prefix, cert, phi)
        oracle = H.brute_force_vietoris_separation(gf.blocks, space)
        if gf.certificate.violations() or oracle is None:
            bad += 1
        GROUP_CERTS.append(gf.certificate)
    return report(6, "grouped families are CD", bad == 0, f"{100 - bad}/100 certified, oracle agrees")


def criterion_7():
    bad = 0
    for seed in range(100):
        space, p1, tau = lift_instance(seed)
        r = transforms.replay_pfin_lift(space, p1, tau, 50)
        bad += not r.sound
    return report(7, "finite-subset lift of Markov strategies", bad == 0, f"{100 - bad}/100 SCD, pairing exact")


def criterion_8():
    Z = spaces.ZProduct()
    t = games.run(GameSpec(Z, 50, "single", "cd"), games.random_cylinder_p1(Z, 0),
                  games.zk_markov_strategy(Z))
    rng = rng_for(0, "zk-probes")
    probes = list(t.selections) + [spaces.ZPoint.of({8: rng.randint(-5, 60)}) for _ in range(50)]
    worst = max(games.escape_hits(t.selections, h, 8) for h in probes)
    ok = worst <= 1 and t.verdict == P2_CERTIFIED
    return report(8, "escape coordinate in Z^K", ok, f"max hits {worst}, {t.verdict}")


def criterion_9():
    Q = spaces.Rationals()
    p2s = pi_base_p2s()
    bad = []
    for p2 in p2s:
        t = games.run(GameSpec(Q, 50, "single", "cd"), games.pi_base_attack(Q, Fraction(0)), p2)
        inside = all(0 < abs(y) < Fraction(1, n) for n, y in enumerate(t.selections, 1))
        at0 = t.verdict == P1_CERTIFIED and t.result.certificate.point == 0
        if not (inside and at0):
            bad.append(p2.label)
    ok = not bad and len({p.label for p in p2s}) == 20
    return report(9, "pi-base attack on the rationals", ok, f"{20 - len(bad)}/20 strategies beaten at 0")


def criterion_10():
    inner = D.divergence_inner(D.discrete_bound(), 2000)
    half = list(itertools.islice(D.family_sampler("D_alpha", 0.5, 100_000), 40))
    full = list(itertools.islice(D.family_sampler("S"), 40))
    violations = []
    for s in divergence_corpus():
        sds = inner(s).claim == D.CERTIFIED
        w_half = D.in_w_class(s, half, inner, class_name="wSD^1/2").claim == D.CERTIFIED
        w = D.in_w_class(s, full, inner).claim == D.CERTIFIED
        if (sds and not w_half) or (w_half and not w):
            violations.append(s.label)
    weave = D.weave(D.naturals(), 0)
    woven = (D.in_w_class(weave, full, inner).claim == D.CERTIFIED
             and D.sds_certificate_by_separation(weave.prefix(2000), D.discrete_bound()).claim == D.REFUTED)
    return report(10, "divergence class inclusions", not violations and woven,
                  f"{len(violations)} violations in 50, woven fixture {'ok' if woven else 'wrong'}")


def criterion_11():
    if not GROUP_CERTS:
        criterion_6()
    bad = sum(bool(H.cd_push_pfin_to_pr(c).violations()) for c in GROUP_CERTS)
    return report(11, "Vietoris to Pixley-Roy certificate push", bad == 0,
                  f"{len(GROUP_CERTS) - bad}/{len(GROUP_CERTS)} pass the exhaustive scan")


def criterion_12():
    distinct_bad, kept, lost = 0, 0, 0
    for space, p1, p2 in injective_replays():
        src = games.run(GameSpec(space, 50, "single", "cd"), p1, p2)
        t = games.run(GameSpec(space, 50, "single", "cd"), p1, transforms.injectivize_p2(p2, space))
        distinct_bad += len(set(t.selections)) != len(t.selections)
        if src.verdict == P2_CERTIFIED:
            if t.verdict == P2_CERTIFIED:
                kept += 1
            else:
                lost += 1
    ok = distinct_bad == 0 and lost == 0
    return report(12, "T1 injectivization", ok,
                  f"{50 - distinct_bad}/50 injective, {kept} certified sources kept, {lost} lost")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    ok = criterion()
    num = int(criterion.__name__.rsplit("_", 1)[1])
    with capsys.disabled():
        print("\n" + RESULTS[num])
    assert ok, RESULTS[num]


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
