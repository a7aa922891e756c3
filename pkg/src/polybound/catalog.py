"""Bundled finite semigroups: every semigroup of order <= 4 up to
isomorphism, plus C5, C6 and S3.

Tables of order n are enumerated by backtracking over the cells in row-major
order, rejecting a partial table as soon as some fully determined triple is
non-associative; each isomorphism class is kept through its least relabelled
table.  The counts 1, 5, 24, 188 are the known numbers of semigroups of
orders 1..4 up to isomorphism.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

from .semigroup import CayleySemigroup, make_cyclic, make_symmetric3


def _associative_so_far(t, n):
    for x in range(n):
        for y in range(n):
            xy = t[x * n + y]
            if xy < 0:
                continue
            for z in range(n):
                yz = t[y * n + z]
                if yz < 0:
                    continue
                left = t[xy * n + z]
                right = t[x * n + yz]
                if left >= 0 and right >= 0 and left != right:
                    return False
    return True


def labelled_semigroups(n):
    """All associative tables on {0..n-1}, as flat tuples."""
    cells = n * n
    t = [-1] * cells
    out = []

    def fill(cell):
        if cell == cells:
            out.append(tuple(t))
            return
        for v in range(n):
            t[cell] = v
            if _associative_so_far(t, n):
                fill(cell + 1)
        t[cell] = -1

    fill(0)
    return out


def canonical_form(flat, n):
    """Least table among all relabellings."""
    best = None
    for p in permutations(range(n)):
        inv = [0] * n
        for i, pi in enumerate(p):
            inv[pi] = i
        # relabelled table: p(x) * p(y) = p(x*y)
        cand = tuple(p[flat[inv[x] * n + inv[y]]] for x in range(n) for y in range(n))
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def semigroups_of_order(n):
    """Canonical tables of the isomorphism classes of order n, sorted."""
    classes = {canonical_form(t, n) for t in labelled_semigroups(n)}
    return tuple(sorted(classes))


def _handle(flat, n, name):
    table = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
    return CayleySemigroup(table, name=name)


def catalog(max_order=4, extras=True):
    """Handles of every catalog semigroup, small orders first."""
    out = []
    for n in range(1, max_order + 1):
        for k, flat in enumerate(semigroups_of_order(n)):
            out.append(_handle(flat, n, f"sg{n}-{k}"))
    if extras:
        out += [make_cyclic(5), make_cyclic(6), make_symmetric3()]
    return out


def is_commutative(S):
    n = S.order
    return all(S.mul(a, b) == S.mul(b, a) for a in range(n) for b in range(a + 1, n))
