"""Bounded search for fiber certificates.

Both polybounded covers and Zariski isolation certificates are finite lists
of pairs (f, b) whose fibers f^-1(b) cover a target part of a window.  This
module enumerates candidate polynomials once per window, collapses pairs
with identical window fibers, and runs a branch-and-bound search that
returns the least certificate in the canonical order:

    (sum of degrees, then the sorted list of pair keys)

where a pair key is (degree, coefficients with the identity first, constant).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .polynomial import PolyTerm
from .semigroup import SemigroupError

log = logging.getLogger(__name__)

DEFAULT_GUARD = 1_000_000


class SearchGuardExceeded(SemigroupError):
    def __init__(self, count, guard):
        super().__init__(f"{count} candidate polynomials exceed the guard {guard}")
        self.count = count
        self.guard = guard


def candidate_count(degree_bound, pool_size):
    k = pool_size + 1
    return sum(k ** (d + 1) for d in range(1, degree_bound + 1))


@dataclass
class Pair:
    rank: int          # position of the polynomial in canonical order
    poly: PolyTerm
    constant: int
    mask: int          # window positions of the fiber, as a bitset

    @property
    def degree(self):
        return self.poly.degree

    def key(self):
        return (self.rank, self.constant)


@dataclass
class PairTable:
    """All distinct window fibers of the candidate polynomials."""

    window: object
    degree_bound: int
    pool: tuple
    pairs: list = field(default_factory=list)
    candidates: int = 0
    functions: int = 0

    @property
    def max_fiber(self):
        return max((p.mask.bit_count() for p in self.pairs), default=0)


def _mask_of(positions):
    m = 0
    for p in positions:
        m |= 1 << int(p)
    return m


def build_pair_table(W, degree_bound, coeff_pool, guard=DEFAULT_GUARD):
    """Enumerate polynomials of degree 1..degree_bound with coefficients in
    ``coeff_pool`` plus the identity, in canonical order.

    Polynomials computing a window function already seen are skipped (the
    earlier one is smaller in canonical order); prefixes are deduplicated
    the same way, since equal prefixes have equal completions.
    """
    if degree_bound < 1:
        raise ValueError("degree bound must be at least 1")
    S = W.semigroup
    pool = tuple(sorted({S.check(c) for c in coeff_pool}))
    count = candidate_count(degree_bound, len(pool))
    if count > guard:
        raise SearchGuardExceeded(count, guard)
    slots = (None,) + pool
    xs = np.arange(W.size, dtype=np.int64)
    table = PairTable(W, degree_bound, pool, candidates=count)

    seen_functions = set()
    seen_masks = {}
    singleton_owner = np.full(W.size, -1, dtype=np.int64)
    singleton_value = np.zeros(W.size, dtype=np.int64)
    functions = []
    general = []

    def consume(coeffs, values):
        key = values.tobytes()
        if key in seen_functions:
            return
        seen_functions.add(key)
        rank = len(functions)
        poly = PolyTerm(S, coeffs)
        functions.append(poly)
        uniq, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
        single = counts[inverse] == 1
        fresh = single & (singleton_owner < 0)
        singleton_owner[fresh] = rank
        singleton_value[fresh] = values[fresh]
        for u in np.flatnonzero(counts > 1):
            mask = _mask_of(np.flatnonzero(inverse == u))
            if mask not in seen_masks:
                seen_masks[mask] = True
                general.append(Pair(rank, poly, int(uniq[u]), mask))

    for d in range(1, degree_bound + 1):
        prefixes = [((a,), a) for a in slots]   # level 0: constant prefixes
        for j in range(1, d + 1):
            nxt, seen = [], set()
            for coeffs, arr in prefixes:
                if arr is None:
                    base = xs
                elif isinstance(arr, np.ndarray):
                    base = S.mul_array(arr, xs)
                else:
                    base = S.mul_array(np.int64(arr), xs)
                for a in slots:
                    v = base if a is None else S.mul_array(base, a)
                    if j == d:
                        consume(coeffs + (a,), v)
                        continue
                    k = v.tobytes()
                    if k in seen:
                        continue
                    seen.add(k)
                    nxt.append((coeffs + (a,), v))
            prefixes = nxt

    pairs = list(general)
    for p in range(W.size):
        r = int(singleton_owner[p])
        if r >= 0:
            mask = 1 << p
            if mask not in seen_masks:
                seen_masks[mask] = True
                pairs.append(Pair(r, functions[r], int(singleton_value[p]), mask))
    pairs.sort(key=Pair.key)
    table.pairs = pairs
    table.functions = len(functions)
    log.debug("pair table: %d candidates, %d functions, %d fibers",
              count, len(functions), len(pairs))
    return table


def _mask_matrix(masks, width):
    nbytes = (width + 7) // 8
    raw = b"".join(m.to_bytes(nbytes, "little") for m in masks)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(masks), nbytes),
                         axis=1, bitorder="little")
    return bits[:, :width]


def _positions(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _Feasibility:
    """Does some set of at most ``slots`` pairs with total degree at most
    ``budget`` cover ``unc``?  Branches on the most constrained element and
    prunes with the fractional bound sum_u 1 / (best gain of a pair covering u).
    """

    def __init__(self, masks, degs, width, max_nodes):
        self.masks = masks
        self.degs = np.array(degs, dtype=np.int64)
        self.matrix = _mask_matrix(masks, width)
        self.max_nodes = max_nodes
        self.nodes = 0

    def __call__(self, unc, rows, slots, budget):
        if unc == 0:
            return True
        if slots <= 0 or budget <= 0 or rows.size == 0:
            return False
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SearchGuardExceeded(self.nodes, self.max_nodes)
        rows = rows[self.degs[rows] <= budget]
        cols = np.array(_positions(unc), dtype=np.int64)
        sub = self.matrix[np.ix_(rows, cols)]
        gain = sub.sum(axis=1, dtype=np.int64)
        keep = gain > 0
        rows, sub, gain = rows[keep], sub[keep], gain[keep]
        if rows.size == 0:
            return False
        best = (sub * gain[:, None]).max(axis=0)
        if (best == 0).any():
            return False
        if slots == 1:
            return bool((gain == cols.size).any())
        if float(np.sum(1.0 / best)) > slots + 1e-9:
            return False
        j = int(np.argmin(sub.sum(axis=0)))
        hit = np.flatnonzero(sub[:, j])
        order = hit[np.argsort(-gain[hit], kind="stable")]
        alive = np.ones(rows.size, dtype=bool)
        for k in order:
            i = int(rows[k])
            if self(unc & ~self.masks[i], rows[alive], slots - 1, budget - int(self.degs[i])):
                return True
            # a cover using i would have been found in this branch
            alive[k] = False
        return False


def search_least_cover(table, target_mask, size_bound, exclude_mask=0, max_nodes=200_000):
    """Least list of at most ``size_bound`` pairs covering ``target_mask``.

    Pairs meeting ``exclude_mask`` are not used.  Returns a list of Pair or
    ``None`` when no certificate exists within the bounds.  The least total
    degree T is found first; the lexicographically least cover of total T is
    then built pair by pair, each choice confirmed by the feasibility search.
    A least-degree cover is irredundant, so every chosen pair adds new points.
    """
    if size_bound < 1:
        raise ValueError("size bound must be at least 1")
    if target_mask == 0:
        raise ValueError("empty target")
    usable = [p for p in table.pairs if not (p.mask & exclude_mask) and p.mask & target_mask]
    if not usable:
        return None
    masks = [p.mask & target_mask for p in usable]
    feas = _Feasibility(masks, [p.degree for p in usable], table.window.size, max_nodes)
    everything = np.arange(len(usable), dtype=np.int64)
    top = size_bound * table.degree_bound
    if not feas(target_mask, everything, size_bound, top):
        return None
    total = next(t for t in range(1, top + 1) if feas(target_mask, everything, size_bound, t))
    chosen, unc, slots, budget, start = [], target_mask, size_bound, total, 0
    while unc:
        for i in range(start, len(usable)):
            d = usable[i].degree
            if d > budget or not masks[i] & unc:
                continue
            rest = everything[i + 1:]
            if feas(unc & ~masks[i], rest, slots - 1, budget - d):
                chosen.append(i)
                unc &= ~masks[i]
                slots -= 1
                budget -= d
                start = i + 1
                break
        else:  # pragma: no cover - contradicts the feasibility answer above
            raise AssertionError("least-cover reconstruction failed")
    return [usable[i] for i in chosen]


def window_mask(W, elements=None):
    if elements is None:
        return (1 << W.size) - 1
    return _mask_of(e for e in elements if 0 <= e < W.size)
