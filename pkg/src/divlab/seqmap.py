"""Strictly increasing maps N -> N (indexed from 1) and their composition.

A :class:`MonotoneMap` is a pure evaluator plus a label. Closed-form maps carry a
numpy-vectorised evaluator; maps defined by a set of excluded values (skip lists,
non-squares, sparse complements) carry a growable sieve that doubles as the
memoised prefix.
"""
from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

_INT64_SAFE = 2**62
SIEVE_LIMIT = 2**24  # largest sieve bound we are willing to allocate


class IndexTooLarge(ValueError):
    """A sieve-backed map was asked for an index beyond ``SIEVE_LIMIT``."""


class MonotoneMap:
    """A strictly increasing map ``n -> phi(n)`` on positive integers."""

    def __init__(
        self,
        evaluator: Callable[[int], int],
        label: str,
        vectorized: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.evaluator = evaluator
        self.label = label
        self._vec = vectorized
        self._memo: dict[int, int] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"MonotoneMap({self.label!r})"

    def __call__(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise ValueError(f"{self.label}: index must be >= 1, got {n}")
        v = self._memo.get(n)
        if v is None:
            v = int(self.evaluator(n))
            with self._lock:
                if len(self._memo) < 1_000_000:
                    self._memo[n] = v
        return v

    def prefix(self, n: int) -> list[int]:
        """``[phi(1), ..., phi(n)]``."""
        return [int(v) for v in self.values_at(np.arange(1, n + 1, dtype=np.int64))]

    def values_at(self, idx: np.ndarray) -> np.ndarray:
        """Evaluate at an index array.

        Returns int64 when every value fits, otherwise an object array of exact
        Python ints.
        """
        idx = np.asarray(idx)
        if idx.size == 0:
            return np.zeros(0, dtype=np.int64)
        if self._vec is not None and idx.dtype != object:
            approx = self._vec(idx.astype(np.float64))
            if np.all(np.isfinite(approx)) and float(np.max(approx)) < _INT64_SAFE:
                return self._vec(idx.astype(np.int64)).astype(np.int64)
        out = [self(int(i)) for i in idx]
        if max(out) < _INT64_SAFE:
            return np.asarray(out, dtype=np.int64)
        return np.asarray(out, dtype=object)

    def count_upto(self, bound: int) -> int:
        """``#{n : phi(n) <= bound}`` by binary search (phi(n) >= n bounds the range)."""
        if bound < 1 or self(1) > bound:
            return 0
        lo, hi = 1, 1
        while hi <= bound and self(hi) <= bound:
            lo, hi = hi, hi * 2
        hi = min(hi, bound + 1)
        # invariant: phi(lo) <= bound, and hi is past the last qualifying index
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self(mid) <= bound:
                lo = mid
            else:
                hi = mid
        return lo

    def range_upto(self, bound: int) -> np.ndarray:
        """Sorted int64 array of the values of the map that are ``<= bound``."""
        k = self.count_upto(bound)
        return self.values_at(np.arange(1, k + 1, dtype=np.int64)).astype(np.int64)


class SieveMap(MonotoneMap):
    """Increasing enumeration of ``{m >= 1 : not excluded(m)}``.

    ``excluded_mask(bound)`` returns a boolean array of length ``bound + 1`` whose
    entry ``m`` marks ``m`` as left out (index 0 is ignored). The enumeration
    array is the memoised prefix; it grows by doubling under a lock.
    """

    def __init__(self, excluded_mask: Callable[[int], np.ndarray], label: str,
                 initial_bound: int = 1024):
        super().__init__(self._scalar, label)
        self._mask_fn = excluded_mask
        self._bound = 0
        self._values = np.zeros(0, dtype=np.int64)
        self._grow(initial_bound)

    def _grow(self, bound: int):
        with self._lock:
            if bound <= self._bound:
                return
            if bound > SIEVE_LIMIT:
                raise IndexTooLarge(f"{self.label}: sieve bound {bound} exceeds {SIEVE_LIMIT}")
            mask = np.asarray(self._mask_fn(bound), dtype=bool)
            keep = np.flatnonzero(~mask[1:bound + 1]) + 1
            self._values = keep.astype(np.int64)
            self._bound = bound

    def _ensure_index(self, n: int):
        while len(self._values) < n:
            before = len(self._values)
            self._grow(min(max(2 * self._bound, 2 * n), max(SIEVE_LIMIT, self._bound + 1)))
            if len(self._values) == before and self._bound > 64 * max(n, 1024):
                raise ValueError(f"{self.label}: enumerated set looks finite")

    def _scalar(self, n: int) -> int:
        self._ensure_index(n)
        return int(self._values[n - 1])

    def values_at(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.size == 0:
            return np.zeros(0, dtype=np.int64)
        self._ensure_index(int(np.max(idx)))
        return self._values[idx.astype(np.int64) - 1]

    def count_upto(self, bound: int) -> int:
        if bound < 1:
            return 0
        self._grow(bound)
        return int(np.searchsorted(self._values, bound, side="right"))


@dataclass(frozen=True)
class Complement:
    """The set ``C_phi = N \\ range(phi)``, used where a set (not a map) is expected."""

    of: MonotoneMap

    @property
    def label(self) -> str:
        return f"C[{self.of.label}]"


@dataclass(frozen=True)
class CofiniteWitness:
    """``phi(pivot + k) == base + k`` for every k >= 0."""

    pivot: int
    base: int

    def validate(self, phi: MonotoneMap, probe: int = 1000) -> bool:
        idx = np.arange(self.pivot, self.pivot + probe + 1, dtype=np.int64)
        return bool(np.array_equal(phi.values_at(idx), idx - self.pivot + self.base))


# ---------------------------------------------------------------- constructors


def affine(a: int, b: int = 0) -> MonotoneMap:
    if a < 1 or a + b < 1:
        raise ValueError(f"affine({a},{b}) is not a map N -> N")
    return MonotoneMap(lambda n: a * n + b, f"affine:{a},{b}",
                       vectorized=lambda x: a * x + b)


def identity() -> MonotoneMap:
    return affine(1, 0)


def shift(c: int) -> MonotoneMap:
    return affine(1, c)


def power(k: int) -> MonotoneMap:
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    return MonotoneMap(lambda n: n**k, f"power:{k}", vectorized=lambda x: x**k)


def skip(excluded: Iterable[int]) -> SieveMap:
    """Enumerate N minus a finite set."""
    ex = sorted({int(e) for e in excluded})

    def mask(bound):
        m = np.zeros(bound + 1, dtype=bool)
        for e in ex:
            if e <= bound:
                m[e] = True
        return m

    return SieveMap(mask, "skip:{" + ",".join(map(str, ex)) + "}")


def _power_mask(k: int):
    def mask(bound):
        m = np.zeros(bound + 1, dtype=bool)
        r = np.arange(1, _iroot(bound, k) + 1, dtype=np.int64)
        m[r**k] = True
        return m
    return mask


def _iroot(n: int, k: int) -> int:
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def nonpowers(k: int = 2) -> SieveMap:
    """Enumerate the positive integers that are not perfect k-th powers."""
    return SieveMap(_power_mask(k), f"nonpowers:{k}")


def sparse(base: int, offset: int = 0) -> SieveMap:
    """Omit ``{base**j + offset : j >= 1}``.

    The complement is logarithmically thin, so ``phi(n) - n`` grows like
    ``log_base(phi(n))`` and the map is delta_alpha-dense for every alpha in (0, 1].
    """
    if base < 2 or offset < 0:
        raise ValueError("sparse needs base >= 2 and offset >= 0")

    def mask(bound):
        m = np.zeros(bound + 1, dtype=bool)
        v = base
        while v + offset <= bound:
            m[v + offset] = True
            v *= base
        return m

    return SieveMap(mask, f"sparse:{base},{offset}")


def blockskip_square() -> SieveMap:
    """Drop the last element of each block, blocks having lengths 1, 4, 9, 16, ...

    Block j ends at 1 + 4 + ... + j^2 = j(j+1)(2j+1)/6.
    """
    def mask(bound):
        m = np.zeros(bound + 1, dtype=bool)
        j = 1
        while True:
            end = j * (j + 1) * (2 * j + 1) // 6
            if end > bound:
                break
            m[end] = True
            j += 1
        return m

    return SieveMap(mask, "blockskip:square")


def cofinite(pivot: int, base: int, head: Optional[Iterable[int]] = None) -> MonotoneMap:
    """A map with ``phi(pivot + k) = base + k``; ``head`` gives phi(1..pivot-1)."""
    head = list(range(1, pivot)) if head is None else [int(h) for h in head]
    if len(head) != pivot - 1:
        raise ValueError("head must list phi(1), ..., phi(pivot-1)")
    if any(b <= a for a, b in zip(head, head[1:])) or (head and (head[0] < 1 or head[-1] >= base)):
        raise ValueError("head must be strictly increasing, >= 1 and below base")
    if base < pivot:
        raise ValueError("base must be >= pivot")
    head_arr = np.asarray(head + [0], dtype=np.int64)

    def ev(n):
        return head[n - 1] if n < pivot else base + (n - pivot)

    def vec(x):
        tail = base + (x - pivot)
        if x.dtype.kind == "f":
            return np.where(x < pivot, 1.0, tail)
        small = head_arr[np.clip(x - 1, 0, len(head_arr) - 1)]
        return np.where(x < pivot, small, tail)

    label = f"cofinite:{pivot},{base}"
    if head != list(range(1, pivot)):
        label += "[" + ",".join(map(str, head)) + "]"
    return MonotoneMap(ev, label, vectorized=vec)


def random_cofinite(rng, max_pivot: int = 20, max_gap: int = 40) -> MonotoneMap:
    """Seeded cofinite map with a random strictly increasing head."""
    pivot = rng.randint(1, max_pivot)
    base = pivot + rng.randint(0, max_gap)
    head = sorted(rng.sample(range(1, base), pivot - 1))
    return cofinite(pivot, base, head)


def complement_enumerator(phi: MonotoneMap) -> SieveMap:
    """Increasing enumeration of ``C_phi``; only valid when ``C_phi`` is infinite."""

    def mask(bound):
        m = np.ones(bound + 1, dtype=bool)
        m[phi.range_upto(bound)] = False
        return m

    return SieveMap(mask, f"enum(C[{phi.label}])")


def compose(phi: MonotoneMap, psi: MonotoneMap) -> MonotoneMap:
    """``n -> phi(psi(n))``."""
    label = f"{phi.label}∘{psi.label}"

    class _Composite(MonotoneMap):
        def values_at(self, idx):
            return phi.values_at(psi.values_at(idx))

    return _Composite(lambda n: phi(psi(n)), label)


def compose_all(*maps: MonotoneMap) -> MonotoneMap:
    out = maps[0]
    for m in maps[1:]:
        out = compose(out, m)
    return out


# ------------------------------------------------------------------ operations


def complement_prefix(phi: MonotoneMap, horizon: int) -> list[int]:
    """``C_phi ∩ [1, horizon]`` in increasing order."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    mask = np.ones(horizon + 1, dtype=bool)
    mask[0] = False
    mask[phi.range_upto(horizon)] = False
    return [int(v) for v in np.flatnonzero(mask)]


def cofinite_witness(phi: MonotoneMap, search_budget: int) -> Optional[CofiniteWitness]:
    """Look for a pivot after which ``phi`` moves in unit steps up to the budget.

    The run of unit steps must cover at least half the budget. ``None`` means
    undetermined within the budget, never "not cofinite".
    """
    if search_budget < 2:
        raise ValueError("search_budget must be >= 2")
    vals = phi.values_at(np.arange(1, search_budget + 1, dtype=np.int64))
    gaps = np.flatnonzero(np.diff(vals) != 1)
    pivot = 1 if gaps.size == 0 else int(gaps[-1]) + 2
    if search_budget - pivot < search_budget // 2:
        return None
    return CofiniteWitness(pivot, int(vals[pivot - 1]))


def cofinite_compose_law(
    w_phi: CofiniteWitness,
    w_psi: CofiniteWitness,
    phi: Optional[MonotoneMap] = None,
    psi: Optional[MonotoneMap] = None,
    probe: int = 1000,
) -> CofiniteWitness:
    """Witness ``(n_phi + n_psi, M_phi + M_psi)`` for ``phi∘psi``.

    With the maps supplied, both inputs and the output are checked exactly on
    ``k <= probe``; a mismatch raises ``ValueError``.
    """
    out = CofiniteWitness(w_phi.pivot + w_psi.pivot, w_phi.base + w_psi.base)
    if phi is not None and psi is not None:
        if not w_phi.validate(phi, probe):
            raise ValueError(f"witness {w_phi} does not hold for {phi.label}")
        if not w_psi.validate(psi, probe):
            raise ValueError(f"witness {w_psi} does not hold for {psi.label}")
        if not out.validate(compose(phi, psi), probe):
            raise ValueError(f"composed witness {out} failed validation")
    return out


def pairing(n: int, j: int) -> int:
    """Cantor diagonal bijection N x N -> N (all indices from 1)."""
    if n < 1 or j < 1:
        raise ValueError("pairing is defined on positive integers")
    d = n + j - 1
    return d * (d - 1) // 2 + j


def unpairing(m: int) -> tuple[int, int]:
    if m < 1:
        raise ValueError("unpairing is defined on positive integers")
    d = (1 + math.isqrt(8 * m - 7)) // 2
    while d * (d - 1) // 2 >= m:
        d -= 1
    while d * (d + 1) // 2 < m:
        d += 1
    j = m - d * (d - 1) // 2
    return d - j + 1, j


# --------------------------------------------------------------------- catalog


def standard_generators() -> dict[str, MonotoneMap]:
    maps = [
        identity(), affine(2, 0), affine(3, 0), affine(5, 0), affine(2, 1),
        shift(1), shift(3), shift(5), power(2), power(3), power(4),
        skip({2, 5}), nonpowers(2), nonpowers(3), sparse(2), sparse(3),
        sparse(10), blockskip_square(), cofinite(3, 7),
    ]
    return {m.label: m for m in maps}


_LABEL = re.compile(r"^(?P<name>[a-z]+)(?::(?P<args>.*))?$")


def parse_label(label: str) -> MonotoneMap:
    """Build a map from a CLI label such as ``power:2``, ``affine:2,0``,
    ``skip:{2,5}``, ``sparse:2`` or a composition ``power:2@power:2``."""
    parts = [p.strip() for p in re.split(r"[@∘]", label)]
    if len(parts) > 1:
        return compose_all(*[parse_label(p) for p in parts])
    m = _LABEL.match(label.strip())
    if not m:
        raise ValueError(f"unrecognised map label {label!r}")
    name, args = m["name"], (m["args"] or "")
    nums = [int(x) for x in re.findall(r"-?\d+", args)]
    try:
        if name == "identity":
            return identity()
        if name == "affine":
            return affine(*nums) if len(nums) == 2 else affine(nums[0])
        if name == "shift":
            return shift(nums[0])
        if name == "power":
            return power(nums[0])
        if name == "skip":
            return skip(nums)
        if name in ("nonsquares",):
            return nonpowers(2)
        if name == "nonpowers":
            return nonpowers(nums[0] if nums else 2)
        if name == "sparse":
            return sparse(*nums)
        if name == "blockskip":
            return blockskip_square()
        if name == "cofinite":
            return cofinite(nums[0], nums[1])
        if name == "evens":
            return affine(2, 0)
        if name == "odds":
            return affine(2, -1)
    except (IndexError, TypeError) as exc:
        raise ValueError(f"bad arguments in map label {label!r}") from exc
    raise ValueError(f"unknown map family {name!r}")
