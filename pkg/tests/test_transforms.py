from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from divlab import divergence, games, hyperspaces, seqmap, spaces, transforms as T
from divlab.games import P1, P2, P2_CERTIFIED, GameSpec, Strategy, StrategyFault
from divlab.hyperspaces import FiniteSubset, GroundOpen, PRBasicOpen, VietorisBasicOpen

from generators import fresh_member_p2, lift_instance, vietoris_p1, zk_avoider

N, Q, Z = spaces.DiscreteNaturals(), spaces.Rationals(), spaces.ZProduct()
WHOLE_N = spaces.BasicOpen(N, N.whole())
fs = FiniteSubset.of


def pair_p2():
    return Strategy(P2, "markov", lambda U, n: fs([2 * n, 2 * n + 1]), "pairs")


def vb(*keys, space=N):
    return VietorisBasicOpen(tuple(GroundOpen.basic(space, k) for k in keys))


# ---------------------------------------------------------------- G1 from Gfin


def test_g1_from_gfin_pairs_on_discrete():
    rep = T.replay_g1_from_gfin(N, games.constant_p1(WHOLE_N), pair_p2(), 30)
    assert rep.sound
    assert rep.replay.selections == [2 * n for n in range(1, 31)]
    assert rep.replay.verdict == P2_CERTIFIED and rep.replay.result.certificate.validate()


def test_g1_from_gfin_singletons_are_identity():
    single = Strategy(P2, "markov", lambda U, n: fs([n]), "singletons")
    rep = T.replay_g1_from_gfin(N, games.constant_p1(WHOLE_N), single, 20)
    assert rep.sound and rep.replay.selections == list(range(1, 21))


def test_g1_from_gfin_on_zk_keeps_separators():
    zk = games.zk_markov_strategy(Z)
    grouped = Strategy(P2, "markov", lambda U, n: fs([zk.rule(U, 2 * n), zk.rule(U, 2 * n + 1)]), "zk_pairs")
    rep = T.replay_g1_from_gfin(Z, games.random_cylinder_p1(Z, 4), grouped, 25)
    assert rep.sound and rep.replay.verdict == P2_CERTIFIED


def test_g1_from_gfin_empty_selection_faults():
    empty = Strategy(P2, "markov", lambda U, n: frozenset() if n == 3 else fs([n]), "hole")
    single = T.g1_from_gfin(empty)
    with pytest.raises(StrategyFault) as e:
        games.run(GameSpec(N, 5, "single", "none"), games.constant_p1(WHOLE_N), single)
    assert e.value.round_index == 3


def test_g1_from_gfin_full_kind():
    def rule(moves, sels):
        used = set().union(*(F.elements for F in sels)) if sels else set()
        return fs([x for x in range(3 * len(moves) + 3) if x not in used][:2])

    single = T.g1_from_gfin(Strategy(P2, "full", rule, "full_fresh"))
    t = games.run(GameSpec(N, 6, "single", "none"), games.constant_p1(WHOLE_N), single)
    assert t.selections == [0, 2, 4, 6, 8, 10]


# ---------------------------------------------------------------- injectivization


def test_injectivize_least_pick_on_discrete():
    rep = T.replay_injectivize(N, games.constant_p1(WHOLE_N), games.least_p2(), 50)
    assert rep.sound
    assert rep.replay.selections == list(range(50))
    assert rep.replay.verdict == P2_CERTIFIED


def test_injectivize_keeps_injective_tau():
    src = games.run(GameSpec(N, 20), games.constant_p1(WHOLE_N), fresh_member_p2())
    rep = T.replay_injectivize(N, games.constant_p1(WHOLE_N), fresh_member_p2(), 20)
    assert rep.replay.selections == src.selections


def test_injectivize_on_rationals_distinct():
    p1 = games.constant_p1(spaces.BasicOpen(Q, Q.interval(Fraction(0), Fraction(1))))
    rep = T.replay_injectivize(Q, p1, games.least_p2(), 25)
    assert rep.sound
    assert len(set(rep.replay.selections)) == 25


def test_injectivize_exhausted_basic_faults():
    p1 = games.constant_p1(spaces.BasicOpen(N, ("pt", 3)))
    rep = T.replay_injectivize(N, p1, games.least_p2(), 4)
    assert not rep.sound and rep.violation["round"] == 2


def test_injectivize_needs_t1():
    sierpinski = spaces.FiniteSpace([0, 1], basis=[{1}, {0, 1}])
    assert not sierpinski.is_T1
    with pytest.raises(ValueError):
        T.injectivize_p2(games.least_p2(), sierpinski)


def test_deinjectivize_examples():
    sigma = games.constant_p1(WHOLE_N)
    tilde = T.deinjectivize_p1(sigma, N)
    t = games.run(GameSpec(N, 30), tilde, games.least_p2())
    assert t.selections == list(range(30))
    assert not t.moves[3].contains(0) and t.moves[3].contains(3)
    degenerate = T.deinjectivize_p1(games.constant_p1(spaces.BasicOpen(N, ("pt", 7))), N)
    with pytest.raises(StrategyFault) as e:
        games.run(GameSpec(N, 3), degenerate, games.least_p2())
    assert e.value.round_index == 2


# ---------------------------------------------------------------- Pfin lift


def test_pfin_lift_discrete_fresh_blocks():
    rep = T.replay_pfin_lift(N, vietoris_p1(N, 1), fresh_member_p2(), 50)
    assert rep.sound and rep.details["pairing_calls"] >= 50


def test_pfin_lift_singleton_basic_degenerates():
    tau = fresh_member_p2()
    lifted, log = T.pfin_markov_lift(tau)
    U = GroundOpen.whole(N)
    for n in range(1, 6):
        F = lifted.rule(VietorisBasicOpen((U,)), n)
        assert F == fs([tau.rule(U.as_open(), seqmap.pairing(n, 1))])
    assert log.round_trips() and [c[:2] for c in log.calls] == [(n, 1) for n in range(1, 6)]


def test_pfin_lift_on_zk():
    rep = T.replay_pfin_lift(Z, vietoris_p1(Z, 2), games.zk_markov_strategy(Z), 50)
    assert rep.sound


def test_pfin_lift_chooser_fault():
    lifted, _ = T.pfin_markov_lift(fresh_member_p2(), chooser=lambda W: vb(("pt", 99)))
    with pytest.raises(StrategyFault):
        lifted.rule(vb(N.whole()), 1)


def test_pfin_lift_rejects_non_markov():
    with pytest.raises(ValueError):
        T.pfin_markov_lift(Strategy(P2, "full", lambda m, s: 0))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_pfin_lift_round_trips(seed):
    space, p1, tau = lift_instance(seed)
    lifted, log = T.pfin_markov_lift(tau)
    games.run(GameSpec(space, 30, "single", "none"), p1, lifted)
    assert log.calls and log.round_trips()
    assert all(seqmap.unpairing(b) == (n, j) for n, j, b in log.calls)


# ---------------------------------------------------------------- history translation


def test_translate_single_open_basics_flatten_identically():
    tau = games.least_p2()
    h = T.pfin_history_translate(tau, "P2")
    sigma = games.constant_p1(vb(N.whole()))
    t = games.run(GameSpec(N, 4, "single", "none"), sigma, h)
    assert t.selections == [fs([0])] * 4


def test_translate_two_block_hand_replay():
    # hyperspace P1 plays [N, N] each round; ground P2 picks the ground round index
    sigma = games.constant_p1(vb(N.whole(), N.whole()))
    gtau = Strategy(P2, "full", lambda moves, sels: len(moves), "index")
    h = T.pfin_history_translate(gtau, "P2")
    t = games.run(GameSpec(N, 3, "single", "none"), sigma, h)
    assert t.selections == [fs([1, 2]), fs([3, 4]), fs([5, 6])]
    ground_p1 = T.pfin_history_translate(sigma, "P1")
    g = games.run(GameSpec(N, 6, "single", "none"), ground_p1, gtau)
    blocks = T.regroup(sigma, g.selections)
    assert [F for _, F, _ in blocks] == t.selections


def test_translate_defeating_ground_play_regroups():
    # ground P2 repeating 0 defeats CD-injectivity; the regrouped blocks repeat too
    sigma = games.constant_p1(vb(N.whole(), ("pt", 0)))
    ground_p1 = T.pfin_history_translate(sigma, "P1")
    g = games.run(GameSpec(N, 8, "single", "none"), ground_p1, games.least_p2())
    blocks = [F for _, F, _ in T.regroup(sigma, g.selections)]
    assert blocks == [fs([0])] * 4


def test_translate_bad_direction():
    with pytest.raises(ValueError):
        T.pfin_history_translate(games.least_p2(), "P3")
    with pytest.raises(ValueError):
        T.pfin_history_translate(games.least_p2(), "P1")


# ---------------------------------------------------------------- divergence lift


def test_divergence_lift_zk_pr():
    pts = [spaces.ZPoint.of({0: n}) for n in range(1, 31)]
    F = fs([spaces.ZPoint.of({1: 1})])
    rep = T.hyper_divergence_lift(pts, divergence.zk_coordinate_bound(0), "PR",
                                  lambda n: (F, GroundOpen.whole(Z)), Z)
    assert rep.sound
    assert all(len(e["hits"]) <= 1 + len(F) for e in rep.details["exclusions"])


def test_divergence_lift_fixed_singleton_inherits():
    pts = list(range(1, 31))
    rep = T.hyper_divergence_lift(pts, divergence.discrete_bound(), "PR", lambda n: fs([0]), N)
    assert rep.sound
    assert [G for G in rep.replay] == [fs([0, n]) for n in pts]


def test_divergence_lift_vietoris_exhaustive():
    pts = list(range(1, 31))
    rep = T.hyper_divergence_lift(pts, divergence.discrete_bound(), "Vietoris", lambda n: fs([0]), N)
    assert rep.sound
    for ex in rep.details["certificates"]:
        assert len(ex.hits) <= len(ex.target)


def test_divergence_lift_rejects_uncertified_ground():
    with pytest.raises(ValueError):
        T.hyper_divergence_lift([1, 2, 2], divergence.discrete_bound(), "PR", lambda n: fs([0]), N)
    with pytest.raises(ValueError):
        T.hyper_divergence_lift([1, 2], divergence.discrete_bound(), "Hausdorff", lambda n: fs([0]), N)


# ---------------------------------------------------------------- nowhere-separable selector


def zk_moves(horizon):
    return [PRBasicOpen(fs([spaces.ZPoint.of({n % 5: n})]), GroundOpen.whole(Z)) for n in range(1, horizon + 1)]


def test_selector_zk_certified():
    rep = T.pr_nowhere_separable_selector(zk_moves(30), zk_avoider, Z)
    assert rep.sound
    assert not rep.details["certificate"].violations()
    assert len(rep.replay) == 30


def test_selector_single_move():
    rep = T.pr_nowhere_separable_selector(zk_moves(1), zk_avoider, Z)
    assert rep.sound and rep.replay[0] == fs([spaces.ZPoint.of({1: 1}), zk_avoider(GroundOpen.whole(Z), None, 1)])


def test_selector_broken_avoider_faults():
    moves = zk_moves(5)

    def broken(U, F, n):
        return next(iter(F)) if n == 4 else zk_avoider(U, F, n)

    with pytest.raises(StrategyFault) as e:
        T.pr_nowhere_separable_selector(moves, broken, Z)
    assert e.value.round_index == 4


# ---------------------------------------------------------------- constant-strategy induction


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.lists(st.integers(0, 5), max_size=2, unique=True),
                          st.integers(-2, 2)), min_size=1, max_size=4),
       st.integers(2, 20))
def test_scd_family_for_basic_is_certified(spec, length):
    keys = []
    for F, v in spec:
        f = spaces.ZPoint.of({k: v for k in F})
        keys.append(Z.cylinder(f, F) if F else Z.whole())
    b = vb(*keys, space=Z)
    fam = T.scd_family_for_basic(b, Z, length)
    assert len(fam) == length
    assert all(hyperspaces.vietoris_member(F, b) for F in fam)
    pts = list(dict.fromkeys(x for F in fam for x in sorted(F.elements, key=repr)))
    res = spaces.cd_search(pts, Z, 64, [])
    assert res.found
    assert not hyperspaces.family_certificate(fam, res.certificate).violations()


# ---------------------------------------------------------------- determinism


def test_transforms_are_deterministic():
    def once():
        a = T.replay_pfin_lift(Z, vietoris_p1(Z, 9), games.zk_markov_strategy(Z), 20).replay.selections
        b = T.replay_injectivize(Q, games.pi_base_attack(Q, Fraction(0)), games.seeded_member_p2(3), 20).replay.selections
        c = T.pr_nowhere_separable_selector(zk_moves(10), zk_avoider, Z).replay
        return a, b, c

    assert once() == once()
