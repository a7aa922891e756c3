"""Structural predicates, congruences, ideals and quotients."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .semigroup import CayleySemigroup, SemigroupError, as_table
from .verdict import EXHAUSTIVE, STRUCTURAL, WINDOW, counterexample, report, verified


def _scope(W):
    return EXHAUSTIVE if W.exhaustive else WINDOW


def _arange(W):
    return np.arange(W.size, dtype=np.int64)


def check_associative(W):
    """Check (ab)c = a(bc) over all triples of the window.

    The counterexample is the least violating triple in lexicographic order.
    """
    S = W.semigroup
    xs = _arange(W)
    bc = S.mul_array(xs[:, None], xs[None, :])
    for a in range(W.size):
        ab = S.mul_array(a, xs)
        left = S.mul_array(ab[:, None], xs[None, :])           # (ab)c
        right = S.mul_array(a, bc)                             # a(bc)
        bad = np.argwhere(left != right)
        if bad.size:
            b, c = (int(v) for v in bad[0])
            return counterexample((a, b, c), window=W.size)
    return verified(_scope(W), window=W.size)


def is_cancellative(W):
    """Injectivity of all shifts x -> axb restricted to the window.

    Two-sided shifts are compositions of one-sided ones, so it suffices to
    test left and right translations.  A counterexample ``(a, b, x, y)``
    means ``a x b = a y b`` with ``x != y``; ``None`` stands for the
    adjoined identity.
    """
    S = W.semigroup
    xs = _arange(W)
    for a in range(W.size):
        for side in ("left", "right"):
            vals = S.mul_array(a, xs) if side == "left" else S.mul_array(xs, a)
            seen = {}
            for x, v in enumerate(vals.tolist()):
                if v in seen:
                    y = x
                    x0 = seen[v]
                    wit = (a, None, x0, y) if side == "left" else (None, a, x0, y)
                    return counterexample(wit, window=W.size)
                seen[v] = x
    return verified(_scope(W), window=W.size)


def has_finite_to_one_shifts(W):
    """Whether the fibers {x : ax = b} and {x : xa = b} are finite.

    Finite handles are verified outright.  Builtins with a structural oracle
    are verified or refuted by it.  Otherwise a report with the largest fiber
    observed inside the window is returned; that is evidence, not a proof.
    """
    S = W.semigroup
    kind = S.shift_fibers()
    if kind == "finite":
        return verified(EXHAUSTIVE, window=W.size)
    if kind in ("injective", "bounded"):
        return verified(STRUCTURAL, window=W.size, oracle=kind)
    size, wit = _largest_fiber(W)
    if isinstance(kind, tuple):
        _, a, b = kind
        fiber = sum(1 for v in S.mul_array(a, _arange(W)).tolist() if v == b)
        return counterexample((a, b), window=W.size, oracle="infinite-fiber",
                              fiber_in_window=fiber, max_fiber=size)
    return report(window=W.size, max_fiber=size, max_fiber_at=wit)


def _largest_fiber(W):
    S = W.semigroup
    xs = _arange(W)
    best, wit = 0, None
    for a in range(W.size):
        for side in ("left", "right"):
            vals = S.mul_array(a, xs) if side == "left" else S.mul_array(xs, a)
            b, count = Counter(vals.tolist()).most_common(1)[0]
            if count > best:
                best, wit = count, {"a": a, "b": b, "side": side}
    return best, wit


def idempotents(W):
    S = W.semigroup
    xs = _arange(W)
    sq = S.mul_array(xs, xs)
    return [int(x) for x in xs[sq == xs]]


def center(W):
    """Window-relative center {z in E_N : xz = zx for all x in E_N}."""
    S = W.semigroup
    xs = _arange(W)
    out = []
    for z in range(W.size):
        if np.array_equal(S.mul_array(xs, z), S.mul_array(z, xs)):
            out.append(z)
    return out


def regular_elements(W):
    """Pairs (x, w) with x w x = x, w the least such witness in the window."""
    S = W.semigroup
    xs = _arange(W)
    out = []
    for x in range(W.size):
        hits = np.flatnonzero(S.mul_array(S.mul_array(x, xs), x) == x)
        if hits.size:
            out.append((x, int(hits[0])))
    return out


def index_period(S, x, cap):
    """Index and period of the monogenic subsemigroup of x, or None if no
    repetition occurs among x^1..x^cap."""
    seen = {}
    p = x
    for k in range(1, cap + 1):
        if p in seen:
            m = seen[p]
            return m, k - m
        seen[p] = k
        p = S.mul(p, x)
    return None


def boundedness_exponent(W, cap=None):
    """Least n with x^n idempotent for every window element, or ``None``.

    x^n is idempotent exactly when n >= index(x) and period(x) divides n.
    ``cap`` bounds the powers inspected (default: the order of a finite
    handle, else the window size); ``None`` means not bounded within it.
    """
    S = W.semigroup
    if cap is None:
        cap = S.order if S.is_finite else W.size
    top_index, lcm = 1, 1
    for x in range(W.size):
        ip = index_period(S, x, cap + 1)
        if ip is None:
            return None
        i, p = ip
        top_index = max(top_index, i)
        lcm = lcm * p // math.gcd(lcm, p)
    n = lcm * max(1, -(-top_index // lcm))
    if not S.is_finite and n > cap:
        return None
    return n


# --------------------------------------------------------------------------
# congruences and quotients


class CongruenceError(SemigroupError):
    pass


@dataclass(frozen=True)
class Congruence:
    """A partition of a finite semigroup; ``labels[x]`` is the least member
    of the class of x."""

    semigroup: object
    labels: tuple

    @property
    def classes(self):
        groups = {}
        for x, r in enumerate(self.labels):
            groups.setdefault(r, []).append(x)
        return [tuple(groups[r]) for r in sorted(groups)]

    @classmethod
    def from_classes(cls, S, classes):
        labels = [None] * S.order
        for cl in classes:
            cl = sorted(cl)
            if not cl:
                raise CongruenceError("empty class")
            for x in cl:
                if labels[x] is not None:
                    raise CongruenceError(f"{x} appears in two classes")
                labels[x] = cl[0]
        if None in labels:
            raise CongruenceError("the classes do not cover the semigroup")
        return cls(S, tuple(labels))

    def __len__(self):
        return len(set(self.labels))


def is_compatible(S, labels):
    rows = as_table(S)
    n = S.order
    for x in range(n):
        for y in range(x + 1, n):
            if labels[x] != labels[y]:
                continue
            for z in range(n):
                if labels[rows[x][z]] != labels[rows[y][z]]:
                    return False
                if labels[rows[z][x]] != labels[rows[z][y]]:
                    return False
    return True


def quotient_by_congruence(S, C):
    """Quotient table and quotient map.

    Classes are numbered by increasing least member; the map is re-checked
    to be a surjective homomorphism.
    """
    if isinstance(C, (list, tuple)) and not isinstance(C, Congruence):
        C = Congruence.from_classes(S, C)
    labels = C.labels
    if not is_compatible(S, labels):
        raise CongruenceError("partition is not compatible with the operation")
    reps = sorted(set(labels))
    pos = {r: k for k, r in enumerate(reps)}
    q = [pos[labels[x]] for x in range(S.order)]
    rows = as_table(S)
    table = [[q[rows[a][b]] for b in reps] for a in reps]
    Q = CayleySemigroup(table, name=f"{S.name}/~", labels=[f"[{S.render(r)}]" for r in reps])
    for a in range(S.order):
        for b in range(S.order):
            if q[rows[a][b]] != Q.mul(q[a], q[b]):
                raise CongruenceError("quotient map is not a homomorphism")
    return Q, q


def is_ideal(W, members):
    S = W.semigroup
    members = set(members)
    if not members:
        return False
    for x in members:
        for y in W.elements:
            if S.mul(x, y) not in members or S.mul(y, x) not in members:
                return False
    return True


def quotient_by_ideal(S, ideal):
    """Rees quotient S/I via the congruence (I x I) u diagonal."""
    ideal = sorted(set(ideal))
    if not S.is_finite:
        raise SemigroupError("Rees quotients are computed for finite handles")
    if not is_ideal(S.window(), ideal):
        raise CongruenceError(f"{ideal} is not an ideal of {S.name}")
    classes = [tuple(ideal)] + [(x,) for x in range(S.order) if x not in ideal]
    Q, q = quotient_by_congruence(S, Congruence.from_classes(S, classes))
    Q.name = f"{S.name}/I"
    return Q, q


def _close(rows, n, parent, pending):
    """Union-find closure of a relation under the semigroup operation."""

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = deque(pending)
    while queue:
        a, b = queue.popleft()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        for z in range(n):
            queue.append((rows[a][z], rows[b][z]))
            queue.append((rows[z][a], rows[z][b]))
    return tuple(find(x) for x in range(n))


def enumerate_congruences(S, guard=8):
    """All congruences of a finite semigroup, each exactly once.

    Every congruence is a join of principal congruences, so the lattice is
    reached from the diagonal by repeatedly joining with single pairs.
    Results are sorted by number of classes (descending), then by labels.
    """
    if not S.is_finite:
        raise SemigroupError("congruences are enumerated for finite handles")
    n = S.order
    if n > guard:
        raise SemigroupError(f"order {n} exceeds the congruence guard {guard}")
    rows = as_table(S)
    start = tuple(range(n))
    found = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for labels in frontier:
            for a in range(n):
                for b in range(a + 1, n):
                    if labels[a] == labels[b]:
                        continue
                    joined = _close(rows, n, list(labels), [(a, b)])
                    if joined not in found:
                        found.add(joined)
                        nxt.append(joined)
        frontier = nxt
    for labels in sorted(found, key=lambda l: (-len(set(l)), l)):
        yield Congruence(S, labels)
