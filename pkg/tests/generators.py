"""Seeded instance generators shared by the acceptance and property suites."""
import itertools
import random
from fractions import Fraction

from divlab import games, hyperspaces, seqmap, spaces, transforms
from divlab.games import P1, P2, GameSpec, Strategy

G = hyperspaces.GroundOpen


def rng_for(seed, name):
    return random.Random(f"{seed}/{name}")


def zk_selections(space, seed, horizon):
    t = games.run(GameSpec(space, horizon, "single", "none"),
                  games.random_cylinder_p1(space, seed), games.zk_markov_strategy(space))
    return t.selections


def random_prefix(rng, space, horizon):
    if isinstance(space, spaces.ZProduct):
        return zk_selections(space, rng.randrange(10**6), horizon)
    return rng.sample(range(5 * horizon), horizon)


BLOCK_MAPS = ["affine:2,0", "affine:3,0", "affine:2,-1", "affine:3,-2", "affine:4,1", "affine:5,0",
              "shift:1", "shift:3", "power:2", "power:3", "identity"]


def random_block_map(rng, horizon):
    while True:
        phi = seqmap.parse_label(rng.choice(BLOCK_MAPS))
        if phi(1) <= horizon:
            return phi


def group_instance(seed):
    """(space, prefix, point certificate, phi) with horizon at most 50."""
    rng = rng_for(seed, "group")
    space = spaces.ZProduct() if rng.random() < 0.5 else spaces.DiscreteNaturals()
    horizon = rng.randint(2, 50)
    prefix = random_prefix(rng, space, horizon)
    cert = spaces.cd_certificate(prefix, space, 64)
    return space, prefix, cert, random_block_map(rng, horizon)


def vietoris_p1(space, seed, max_opens=3):
    """Seeded Vietoris moves: cylinders on Z^K, singletons or the whole space on N."""

    def rule(n):
        rng = rng_for(seed, f"vietoris/{n}")
        opens = []
        for _ in range(rng.randint(1, max_opens)):
            if isinstance(space, spaces.ZProduct):
                F = rng.sample(range(6), rng.randint(0, 2))
                f = spaces.ZPoint.of({k: rng.randint(-3, 3) for k in F})
                opens.append(G.basic(space, space.cylinder(f, F) if F else space.whole()))
            elif rng.random() < 0.3:
                opens.append(G.basic(space, ("pt", rng.randrange(40))))
            else:
                opens.append(G.basic(space, space.whole()))
        return hyperspaces.VietorisBasicOpen(tuple(opens))

    return Strategy(P1, "predetermined", rule, f"vietoris:{seed}")


def fresh_member_p2():
    """Markov on N: ``n`` itself when the move contains it, else the least member."""

    def rule(move, n):
        return n if move.contains(n) else next(iter(move.members()))

    return Strategy(P2, "markov", rule, "fresh_member")


def lift_instance(seed):
    rng = rng_for(seed, "lift")
    if rng.random() < 0.5:
        space = spaces.ZProduct()
        tau = games.zk_markov_strategy(space)
    else:
        space = spaces.DiscreteNaturals()
        tau = fresh_member_p2()
    return space, vietoris_p1(space, seed), tau


def zk_avoider(U, F, n, coordinate=20):
    base = dict(U.basics[0][1]) if U.kind == "union" and U.basics[0][0] == "cyl" else {}
    base[coordinate] = 1000 + n
    return spaces.ZPoint.of(base)


def pi_base_p2s():
    """Twenty distinct P2 strategies for the rationals."""
    out = [games.seeded_member_p2(s, window=4 + s % 13) for s in range(12)]
    out += [games.least_p2(), games.nth_member_p2(1), games.nth_member_p2(5), games.nth_member_p2(17)]
    out += [games.irrational_target_p2(d) for d in (2, 3, 5, 7)]
    return out


def injective_replays():
    """Fifty (space, P1, P2) replays on discrete N and the rationals."""
    N, Q = spaces.DiscreteNaturals(), spaces.Rationals()
    wholeN = spaces.BasicOpen(N, N.whole())
    out = []
    for i in range(25):
        rng = rng_for(i, "inj-N")
        if i % 2 == 0:
            p1 = games.constant_p1(wholeN, "whole")
        else:
            holes = lambda n, s=i: rng_for(s, f"holes/{n}").sample(range(3 * n + 5), n % 4)
            p1 = games.predetermined_p1(lambda n, h=holes: spaces.punctured(wholeN, h(n)), f"punctured:{i}")
        p2 = [games.least_p2(), games.nth_member_p2(i % 5), games.seeded_member_p2(i)][i % 3]
        out.append((N, p1, p2))
    for i in range(25):
        if i % 2 == 0:
            p1 = games.predetermined_p1(
                lambda n: spaces.BasicOpen(Q, ("iv", Fraction(n), Fraction(n + 1))), "moving")
        else:
            r = rng_for(i, "inj-Q")
            lo = Fraction(r.randint(-50, 50), r.randint(1, 9))
            p1 = games.predetermined_p1(
                lambda n, lo=lo: spaces.BasicOpen(Q, ("iv", lo + n, lo + n + Fraction(1, n))), f"shrinking:{i}")
        p2 = [games.least_p2(), games.irrational_target_p2([2, 3, 5][i % 3]), games.seeded_member_p2(i)][i % 3]
        out.append((Q, p1, p2))
    return out


def divergence_corpus():
    """Fifty sequences in discrete N for the class-inclusion check."""
    from divlab import divergence as D
    S = D.Seq
    out = [D.naturals()]
    for a, b in [(2, 0), (3, 1), (5, 2), (7, 0)]:
        out.append(S(f"{a}n+{b}", lambda n, a=a, b=b: a * n + b))
    for k in (2, 3):
        out.append(S(f"n^{k}", lambda n, k=k: n**k))
    for c in (0, 1, 5, 42):
        out.append(D.weave(D.naturals(), c))
        out.append(D.constant(c))
    for k in (2, 3, 7):
        out.append(S(f"n mod {k}", lambda n, k=k: n % k))
        out.append(S(f"n//{k}", lambda n, k=k: n // k))
    for cut in (10, 100, 1000):
        out.append(S(f"n until {cut}, then 0", lambda n, cut=cut: n if n < cut else 0))
    out.append(S("0 on squares, n elsewhere",
                 lambda n: 0 if seqmap._iroot(n, 2) ** 2 == n else n))
    out.append(S("0 on cubes, n elsewhere",
                 lambda n: 0 if seqmap._iroot(n, 3) ** 3 == n else n))
    out.append(S("0 on evens, n elsewhere", lambda n: 0 if n % 2 == 0 else n))
    out.append(S("0 on multiples of 3, n elsewhere", lambda n: 0 if n % 3 == 0 else n))
    out.append(S("0 on powers of 2, n elsewhere", lambda n: 0 if n & (n - 1) == 0 else n))
    for lab in ("affine:2,0", "power:2", "shift:4", "nonpowers:2", "sparse:3"):
        out.append(D.naturals().compose(seqmap.parse_label(lab)))
        out.append(D.weave(D.naturals(), 3).compose(seqmap.parse_label(lab)))
    rng = rng_for(0, "corpus")
    labels = {s.label for s in out}
    while len(out) < 50:
        k, c = rng.randint(2, 6), rng.randint(0, 9)
        lab = f"{c} at multiples of {k}, n elsewhere"
        if lab not in labels:
            labels.add(lab)
            out.append(S(lab, lambda n, k=k, c=c: c if n % k == 0 else n))
    return out[:50]
