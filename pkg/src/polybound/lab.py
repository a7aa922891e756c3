"""Window-scale versions of the non-closedness constructions.

* the avoider sequence x_0, x_1, ... whose n-th term escapes every equation
  f(x) = c with f of degree k <= n and coefficients, constant drawn from
  products of at most n elements of the pool {b_1..b_n} u {x_0..x_{n-1}};
* the family K of sets a_0 A a_1 ... A a_n and the four conditions on it;
* the 0-neighbourhood oracle of the topology built from K;
* filter bases, their products and free/principal classification.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .search import SearchGuardExceeded
from .semigroup import SemigroupError

log = logging.getLogger(__name__)

DEFAULT_SET_GUARD = 200_000


class LabError(SemigroupError):
    pass


class WindowExhausted(LabError):
    """No usable candidate remained inside the window; carries the partial sequence."""

    def __init__(self, step, sequence):
        super().__init__(f"window exhausted at step {step} after {len(sequence.elements)} terms")
        self.step = step
        self.sequence = sequence


# --------------------------------------------------------------------------
# avoider sequence


@dataclass
class StepLog:
    step: int
    element: int
    pool_size: int          # |{b_1..b_n} u {x_0..x_{n-1}}| with repetitions removed
    words: int              # distinct products of at most n pool elements, identity included
    tuples: int             # coefficient tuples (a_0..a_k, c) constrained at this step
    rejected: int           # window candidates rejected before x_n


@dataclass
class AvoiderSequence:
    semigroup: object
    window: int
    elements: list = field(default_factory=list)
    log: list = field(default_factory=list)


@dataclass
class PolyboundedObstruction:
    """Every unused element of an exhaustive window violates the step condition.

    Advisory only: it is evidence of polyboundedness, not a proof.
    """
    step: int
    sequence: AvoiderSequence
    rejected: list


def step_pool(S, step, previous):
    """b_1..b_n (the first n enumerated elements) followed by x_0..x_{n-1}."""
    out = []
    for p in list(range(step)) + list(previous[:step]):
        if S.is_finite and p >= S.order:
            continue
        if p not in out:
            out.append(p)
    return out


def word_products(S, pool, length, guard=DEFAULT_SET_GUARD):
    """Products of at most ``length`` pool elements; ``None`` is the empty word."""
    words = {None}
    level = {None}
    for _ in range(length):
        level = {S.mul_ext(w, p) for w in level for p in pool}
        new = level - words
        words |= level
        if len(words) > guard:
            raise SearchGuardExceeded(len(words), guard)
        if not new:
            break
        level = new
    return words


def _violates_generic(S, x, words, step, guard):
    consts = words - {None}
    reach = set(words)
    for k in range(1, step + 1):
        reach = {S.mul_ext(S.mul_ext(r, x), a)
                 for r in reach for a in words}
        if len(reach) > guard:
            raise SearchGuardExceeded(len(reach), guard)
        if reach & consts:
            return k
    return 0


def _iter_bits(m):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _sums_upto(pool, count, cap=None):
    """Bitset of sums of at most ``count`` pool values (0 included)."""
    acc = 1
    capmask = None if cap is None else (1 << (cap + 1)) - 1
    for _ in range(count):
        nxt = acc
        for p in pool:
            nxt |= acc << p
        if capmask is not None:
            nxt &= capmask
        if nxt == acc:
            break
        acc = nxt
    return acc


def _forbidden_nat(pool, step, size):
    """x in [0, size) with c + k x = b for some k <= step, b a sum of at most
    ``step`` pool values and c a sum of at most (k+1)*step of them."""
    words = _sums_upto(pool, step)
    cap = words.bit_length() - 1
    bad = np.zeros(size, dtype=bool)
    for k in range(1, step + 1):
        coeffs = _sums_upto(pool, (k + 1) * step, cap)
        diff = 0
        for c in _iter_bits(coeffs):
            diff |= words >> c
        for d in _iter_bits(diff):
            if d % k == 0 and d // k < size:
                bad[d // k] = True
    return bad, words


def build_avoider_sequence(W, steps, guard=DEFAULT_SET_GUARD):
    """Greedy least-index sequence satisfying the step conditions 0..steps.

    Returns an AvoiderSequence, or a PolyboundedObstruction when an exhaustive
    window has unused elements but none passes.  Raises WindowExhausted when
    the window runs out first.
    """
    S = W.semigroup
    seq = AvoiderSequence(S, W.size)
    seq.elements.append(0)
    seq.log.append(StepLog(0, 0, 0, 1, 0, 0))
    nat = S.additive == "nat"
    for n in range(1, steps + 1):
        pool = step_pool(S, n, seq.elements)
        used = set(seq.elements)
        if nat:
            bad, words = _forbidden_nat(pool, n, W.size)
            nwords = bin(words).count("1")
            rejected = [x for x in range(W.size) if x not in used and bad[x]]
            pick = next((x for x in range(W.size) if x not in used and not bad[x]), None)
            if pick is not None:
                rejected = [x for x in rejected if x < pick]
        else:
            words = word_products(S, pool, n, guard)
            nwords = len(words)
            rejected, pick = [], None
            for x in W.elements:
                if x in used:
                    continue
                if _violates_generic(S, x, words, n, guard):
                    rejected.append(x)
                else:
                    pick = x
                    break
        # the empty word is a coefficient but never a constant; on (N,+) its
        # value 0 is also the element b_1, so every word value is a constant
        nconsts = nwords if nat else nwords - 1
        tuples = sum(nwords ** (k + 1) * nconsts for k in range(1, n + 1))
        if pick is None:
            if W.exhaustive and rejected:
                return PolyboundedObstruction(n, seq, rejected)
            raise WindowExhausted(n, seq)
        seq.elements.append(pick)
        seq.log.append(StepLog(n, pick, len(pool), nwords, tuples, len(rejected)))
        log.debug("step %d: x=%d after %d rejections", n, pick, len(rejected))
    return seq


# --------------------------------------------------------------------------
# independent re-verification


def _min_coins(pool, cap):
    """Fewest pool values summing to v, for v in [0, cap] (inf if none)."""
    inf = np.iinfo(np.int64).max // 4
    best = np.full(cap + 1, inf, dtype=np.int64)
    best[0] = 0
    for v in range(1, cap + 1):
        for p in pool:
            if 0 < p <= v and best[v - p] + 1 < best[v]:
                best[v] = best[v - p] + 1
    return best


def _literal_violation(S, x, pool, step):
    words = set()
    for t in itertools.product([None] + list(pool), repeat=step):
        acc = None
        for p in t:
            acc = S.mul_ext(acc, p)
        words.add(acc)
    words = sorted(words, key=lambda w: -1 if w is None else w)
    consts = {w for w in words if w is not None}
    for k in range(1, step + 1):
        for coeffs in itertools.product(words, repeat=k + 1):
            acc = coeffs[0]
            for a in coeffs[1:]:
                acc = S.mul_ext(S.mul_ext(acc, x), a)
            if acc in consts:
                return (k, coeffs, acc)
    return None


def reverify_avoider(seq, check_least=True, literal_limit=100_000):
    """Re-derive every step condition from scratch.

    (N,+) uses a coin-change table: a value is a product of at most m pool
    elements iff its fewest-coins count is at most m.  Other handles
    enumerate coefficient tuples literally (guarded by ``literal_limit``).
    Returns a list of problems; empty means verified.
    """
    S = seq.semigroup
    xs = seq.elements
    problems = []
    if len(set(xs)) != len(xs):
        problems.append("terms are not pairwise distinct")
    for n in range(1, len(xs)):
        pool = step_pool(S, n, xs)
        if S.additive == "nat":
            x = xs[n]
            cap = n * max(pool)
            coins = _min_coins(pool, cap)
            bvals = np.flatnonzero(coins <= n)
            cands = np.arange(x + 1, dtype=np.int64)
            bad = np.zeros(cands.size, dtype=bool)
            for k in range(1, n + 1):
                d = bvals[:, None] - k * cands[None, :]
                ok = d >= 0
                hit = np.zeros(d.shape, dtype=bool)
                hit[ok] = coins[d[ok]] <= (k + 1) * n
                bad |= hit.any(axis=0)
            if bad[x]:
                problems.append(f"step {n}: x={x} violates the condition")
            if check_least:
                for y in range(x):
                    if y not in xs[:n] and not bad[y]:
                        problems.append(f"step {n}: smaller candidate {y} also passes")
                        break
        else:
            nw = (len(pool) + 1) ** n
            if nw ** 2 > literal_limit:
                problems.append(f"step {n}: literal enumeration exceeds its limit")
                continue
            x = xs[n]
            v = _literal_violation(S, x, pool, n)
            if v is not None:
                problems.append(f"step {n}: x={x} violates via {v}")
            if check_least:
                for y in range(x):
                    if y not in xs[:n] and _literal_violation(S, y, pool, n) is None:
                        problems.append(f"step {n}: smaller candidate {y} also passes")
                        break
    return problems


# --------------------------------------------------------------------------
# the family K


def _coeff_key(c):
    return -1 if c is None else c


@dataclass
class FamilyK:
    semigroup: object
    base: tuple                      # the elements of A
    pool: tuple                      # coefficients besides the identity
    max_blocks: int
    entries: list                    # coefficient tuples (a_0..a_n)
    truncated: bool = False

    def expansion(self, entry, window=None):
        """a_0 A a_1 ... A a_n, intersected with the first ``window`` elements."""
        S = self.semigroup
        vals = {entry[0]}
        for a in entry[1:]:
            vals = {S.mul_ext(S.mul_ext(v, x), a) for v in vals for x in self.base}
        out = {v for v in vals if v is not None}
        if window is not None:
            out = {v for v in out if v < window}
        return out


def gen_family_K(seq, coeff_pool, max_blocks, max_entries=None):
    """All (a_0..a_n), 1 <= n <= max_blocks, a_i in pool u {identity},
    in canonical order (blocks, then coefficients with the identity first)."""
    S = seq.semigroup if isinstance(seq, AvoiderSequence) else seq[0]
    base = tuple(seq.elements) if isinstance(seq, AvoiderSequence) else tuple(seq[1])
    pool = tuple(sorted({S.check(c) for c in coeff_pool}))
    slots = (None,) + pool
    entries, truncated = [], False
    for n in range(1, max_blocks + 1):
        for t in itertools.product(slots, repeat=n + 1):
            if max_entries is not None and len(entries) >= max_entries:
                truncated = True
                break
            entries.append(t)
    return FamilyK(S, base, pool, max_blocks, entries, truncated)


@dataclass
class ConditionReport:
    condition: int
    holds: bool
    checked: int
    witnessed_by_tuple: int = 0
    witnessed_by_inclusion: int = 0
    unwitnessed: list = field(default_factory=list)
    skipped: int = 0
    max_fiber: int = 0
    max_fiber_at: object = None
    bound: int = None


def check_l0_conditions(K, W, fiber_bound=10):
    """Window checks of the four conditions.

    (1), (2): a pair is checked when the tuple given by the concatenation
        identities stays within the generation bounds (at most max_blocks
        blocks, coefficients in the pool plus the identity); other pairs are
        counted as skipped.  A checked pair is witnessed by that tuple when
        it is an entry and the window inclusion holds, else by inclusion into
        any entry.
    (3) largest {x in K : a x b = c} over a, b in the pool and all c.
    (4) largest {(x, y) in K x L : x y = c} over all entries and all c.
    """
    S = K.semigroup
    N = W.size
    index = {t: i for i, t in enumerate(K.entries)}
    exp = [K.expansion(t, N) for t in K.entries]
    slots = (None,) + K.pool
    allowed = set(slots)

    def judge(report, t, target, ident):
        if len(t) - 1 > K.max_blocks or not allowed.issuperset(t):
            report.skipped += 1
            return
        report.checked += 1
        if t in index and target <= exp[index[t]]:
            report.witnessed_by_tuple += 1
        elif any(target <= e for e in exp):
            report.witnessed_by_inclusion += 1
        else:
            report.unwitnessed.append(ident)

    def prod_set(E, F):
        return {v for v in (S.mul(x, y) for x in E for y in F) if v < N}

    r1 = ConditionReport(1, True, 0)
    for i, s in enumerate(K.entries):
        for j, t in enumerate(K.entries):
            cat = s[:-1] + (S.mul_ext(s[-1], t[0]),) + t[1:]
            if len(cat) - 1 > K.max_blocks:
                r1.skipped += 1
                continue
            judge(r1, cat, prod_set(exp[i], exp[j]), (i, j))
    r1.holds = not r1.unwitnessed

    r2 = ConditionReport(2, True, 0)
    for i, s in enumerate(K.entries):
        for a in slots:
            for b in slots:
                t = (S.mul_ext(a, s[0]),) + s[1:-1] + (S.mul_ext(s[-1], b),)
                if not allowed.issuperset(t):
                    r2.skipped += 1
                    continue
                target = {v for v in (S.mul_ext(S.mul_ext(a, x), b) for x in exp[i]) if v < N}
                judge(r2, t, target, (i, a, b))
    r2.holds = not r2.unwitnessed

    r3 = ConditionReport(3, True, 0, bound=fiber_bound)
    for i, e in enumerate(exp):
        if not e:
            continue
        xs = np.array(sorted(e), dtype=np.int64)
        for a in slots:
            for b in slots:
                r3.checked += 1
                vals = xs if a is None else S.mul_array(a, xs)
                vals = vals if b is None else S.mul_array(vals, b)
                _, counts = np.unique(vals, return_counts=True)
                top = int(counts.max())
                if top > r3.max_fiber:
                    r3.max_fiber, r3.max_fiber_at = top, (i, a, b)
    r3.holds = r3.max_fiber <= fiber_bound

    r4 = ConditionReport(4, True, 0, bound=fiber_bound)
    arrays = [np.array(sorted(e), dtype=np.int64) for e in exp]
    seen = {}
    for i, xi in enumerate(arrays):
        for j, yj in enumerate(arrays):
            if not xi.size or not yj.size:
                continue
            key = (xi.tobytes(), yj.tobytes())
            if key in seen:
                continue
            seen[key] = True
            r4.checked += 1
            vals = S.mul_array(xi[:, None], yj[None, :]).ravel()
            _, counts = np.unique(vals, return_counts=True)
            top = int(counts.max())
            if top > r4.max_fiber:
                r4.max_fiber, r4.max_fiber_at = top, (i, j)
    r4.holds = r4.max_fiber <= fiber_bound
    return [r1, r2, r3, r4]


# --------------------------------------------------------------------------
# 0-neighbourhoods


def default_threshold(size):
    return math.ceil(size / 10)


@dataclass
class TauZeroOracle:
    family: FamilyK
    window: object
    threshold: int = None

    def __post_init__(self):
        if self.threshold is None:
            self.threshold = default_threshold(self.window.size)


@dataclass
class NeighborhoodAnswer:
    is_neighborhood: bool
    deficits: list
    threshold: int


def tau0_is_neighborhood(V, oracle, contains_zero=True):
    """V is a set of window elements of X; the adjoined zero is assumed in V.

    Neighbourhood iff every entry's window expansion misses at most
    ``threshold`` points of V.
    """
    if not contains_zero:
        raise LabError("a neighbourhood of 0 must contain 0")
    V = set(V)
    N = oracle.window.size
    deficits = [len(oracle.family.expansion(t, N) - V) for t in oracle.family.entries]
    ok = all(d <= oracle.threshold for d in deficits)
    return NeighborhoodAnswer(ok, deficits, oracle.threshold)


# --------------------------------------------------------------------------
# filter bases


@dataclass
class FilterBase:
    window: object
    sets: list

    def __post_init__(self):
        self.sets = [frozenset(int(v) for v in s) for s in self.sets]
        if not self.sets:
            raise LabError("a filter base needs at least one set")
        if any(not s for s in self.sets):
            raise LabError("filter base sets must be nonempty")
        for s, t in itertools.combinations(self.sets, 2):
            if not s & t:
                raise LabError("filter base sets must pairwise intersect")

    @property
    def semigroup(self):
        return self.window.semigroup

    def deficits(self):
        N = self.window.size
        return [N - sum(1 for v in s if v < N) for s in self.sets]


def cofinite(W, exclude=()):
    ex = set(exclude)
    return frozenset(x for x in W.elements if x not in ex)


def set_product(S, E, F):
    """EF = {xy : x in E, y in F} (not truncated to the window)."""
    e = np.fromiter(sorted(E), dtype=np.int64)
    f = np.fromiter(sorted(F), dtype=np.int64)
    return frozenset(np.unique(S.mul_array(e[:, None], f[None, :])).tolist())


def _shift(S, a, E):
    if a is None:
        return frozenset(E)
    e = np.fromiter(sorted(E), dtype=np.int64)
    return frozenset(np.unique(S.mul_array(a, e)).tolist())


def filter_product(E, F):
    if E.window.semigroup is not F.window.semigroup or E.window.size != F.window.size:
        raise LabError("filter bases live on different windows")
    S = E.semigroup
    sets = []
    for s in E.sets:
        for t in F.sets:
            p = set_product(S, s, t)
            assert p, "product of nonempty sets is nonempty"
            if p not in sets:
                sets.append(p)
    return FilterBase(E.window, sets)


def shifted_product_base(F, shifts):
    """{a_0 F_1 a_1 ... F_n a_n : F_i base sets}, n = len(shifts) - 1."""
    S = F.semigroup
    if len(shifts) < 2:
        raise LabError("need shifts a_0..a_n with n >= 1")
    n = len(shifts) - 1
    sets = []
    for combo in itertools.product(F.sets, repeat=n):
        acc = _shift(S, shifts[0], combo[0])
        acc = _shift_right(S, acc, shifts[1])
        for k in range(1, n):
            acc = set_product(S, acc, combo[k])
            acc = _shift_right(S, acc, shifts[k + 1])
        if acc not in sets:
            sets.append(acc)
    return FilterBase(F.window, sets)


def _shift_right(S, E, a):
    if a is None:
        return frozenset(E)
    e = np.fromiter(sorted(E), dtype=np.int64)
    return frozenset(np.unique(S.mul_array(e, a)).tolist())


@dataclass
class FilterClass:
    free_on_window: bool
    principal_on_window: bool
    core: tuple              # intersection of the base sets
    threshold: int

    @property
    def neither(self):
        return not self.free_on_window and not self.principal_on_window


def filter_classify(F, threshold=None):
    core = frozenset.intersection(*F.sets)
    t = default_threshold(F.window.size) if threshold is None else threshold
    return FilterClass(not core, any(len(s) == 1 for s in F.sets), tuple(sorted(core)), t)


def t1_witness_check(F, shifts, threshold=None):
    """Classify a_0 F a_1 ... F a_n; the sufficient condition is witnessed when
    the result is neither free nor principal."""
    return filter_classify(shifted_product_base(F, shifts), threshold)


def it1_witness_check(F, shifts):
    """Least pair u < v lying in every shifted product set, or ``None``."""
    core = filter_classify(shifted_product_base(F, shifts)).core
    if len(core) < 2:
        return None
    return core[0], core[1]


def parse_scenario(W, text):
    """Base sets, one per line: ``cofinite exclude i j ...``, ``singleton i``,
    ``explicit i j ...``."""
    S = W.semigroup
    sets = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            nums = [S.check(int(w)) for w in words[1:] if w != "exclude"]
        except ValueError:
            raise LabError(f"line {lineno}: indices must be integers") from None
        kind = words[0]
        if kind == "cofinite" and (len(words) == 1 or words[1] == "exclude"):
            sets.append(cofinite(W, nums))
        elif kind == "singleton" and len(nums) == 1:
            sets.append(frozenset(nums))
        elif kind == "explicit" and nums:
            sets.append(frozenset(nums))
        else:
            raise LabError(f"line {lineno}: cannot parse {line!r}")
    return FilterBase(W, sets)
