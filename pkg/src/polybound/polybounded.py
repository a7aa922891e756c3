"""Polybounded covers: verification, search, normalization and transport.

A cover of a set A is a finite list of pairs (f_i, b_i) with
A contained in the union of the fibers f_i^-1(b_i).  The default target is
the whole window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import structure
from .polynomial import (PolyTerm, compose, evaluate, evaluate_many, identity_poly,
                         is_pruned, parse_poly, poly_power, prune_decompose, render,
                         square_poly)
from .search import DEFAULT_GUARD, build_pair_table, search_least_cover, window_mask
from .semigroup import ProductSemigroup, SemigroupError, Window, as_table, product
from .verdict import EXHAUSTIVE, WINDOW, counterexample, verified

log = logging.getLogger(__name__)


class CoverError(SemigroupError):
    pass


@dataclass(frozen=True)
class Cover:
    semigroup: object
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((f, self.semigroup.check(b)) for f, b in self.pairs)
        if not pairs:
            raise CoverError("a cover needs at least one pair")
        for f, _ in pairs:
            if f.semigroup is not self.semigroup:
                raise CoverError("all polynomials of a cover must share its handle")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def product_form(cls, S, polys, constants):
        """The cover F x B produced by pruning and regularization."""
        return cls(S, tuple((f, b) for f in polys for b in constants))

    @property
    def polys(self):
        out = []
        for f, _ in self.pairs:
            if f not in out:
                out.append(f)
        return out

    @property
    def constants(self):
        return sorted({b for _, b in self.pairs})

    def __len__(self):
        return len(self.pairs)

    def lines(self):
        return [f"{render(f)} = {b}" for f, b in self.pairs]


@dataclass
class GroupStructure:
    semigroup: object
    identity: int
    inverse: dict = field(default_factory=dict)


def _target_array(W, target):
    if target is None:
        return np.arange(W.size, dtype=np.int64)
    return np.array(sorted(t for t in set(target) if 0 <= t < W.size), dtype=np.int64)


def covered_mask(cover, xs):
    hit = np.zeros(len(xs), dtype=bool)
    for f, b in cover.pairs:
        hit |= evaluate_many(f, xs) == b
    return hit


def verify_cover(W, cover, target=None):
    """Check that every target element of the window lies in some fiber.

    The verdict is exhaustive when the window is all of a finite handle.
    """
    if cover.semigroup is not W.semigroup:
        raise CoverError("cover and window are on different handles")
    xs = _target_array(W, target)
    hit = covered_mask(cover, xs)
    if not hit.all():
        x = int(xs[np.argmin(hit)])
        return counterexample(x, window=W.size, pairs=len(cover))
    return verified(EXHAUSTIVE if W.exhaustive else WINDOW, window=W.size, pairs=len(cover))


def trivial_finite_cover(S):
    """{(x, b) : b in S}: every element is its own value under f(x) = x."""
    if not S.is_finite:
        raise CoverError(f"{S.name} is infinite")
    f = identity_poly(S)
    return Cover(S, tuple((f, b) for b in range(S.order)))


def search_cover(W, degree_bound, coeff_pool, size_bound, target=None,
                 guard=DEFAULT_GUARD, table=None):
    """Least cover of the target within the bounds, or ``None``.

    Candidates have degree 1..degree_bound and coefficients from
    ``coeff_pool`` plus the identity.  Ties are broken by the canonical
    order (sum of degrees, then coefficients, then constants).
    """
    if table is None:
        table = build_pair_table(W, degree_bound, coeff_pool, guard=guard)
    chosen = search_least_cover(table, window_mask(W, target), size_bound)
    if chosen is None:
        return None
    cover = Cover(W.semigroup, tuple((p.poly, p.constant) for p in chosen))
    assert verify_cover(W, cover, target), "search produced an invalid cover"
    return cover


def parse_cover(S, text):
    """One pair per line: ``<poly> = <element index>``; '#' starts a comment."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CoverError(f"line {lineno}: expected '<poly> = <index>'")
        lhs, rhs = line.rsplit("=", 1)
        try:
            b = int(rhs.strip())
        except ValueError:
            raise CoverError(f"line {lineno}: bad constant {rhs.strip()!r}") from None
        pairs.append((parse_poly(S, lhs), b))
    return Cover(S, tuple(pairs))


def format_cover(cover):
    return "\n".join(cover.lines()) + "\n"


# --------------------------------------------------------------------------
# normalization


def _fiber_of_shift(S, xs, a, b, c):
    """Elements t of xs with a t b = c (a, b in X^1)."""
    vals = xs
    if a is not None:
        vals = S.mul_array(a, vals)
    if b is not None:
        vals = S.mul_array(vals, b)
    return [int(t) for t in xs[vals == c]]


def prune_cover(cover, W, target=None):
    """Replace each f = a g b by its pruned part g; constants become the
    fiber set B = {t : a t b = c} over all pairs, and the result is F x B.
    """
    S = W.semigroup
    if not verify_cover(W, cover, target):
        raise CoverError("input cover does not verify")
    kind = S.shift_fibers()
    if not (kind in ("finite", "injective", "bounded")):
        raise CoverError(f"shift fibers of {S.name} are not known to be finite")
    xs = _target_array(W, target)
    polys, consts = [], set()
    for f, c in cover.pairs:
        a, g, b = prune_decompose(f)
        if g not in polys:
            polys.append(g)
        if S.is_finite:
            pool = np.arange(S.order, dtype=np.int64)
        else:
            # the window plus every value g takes on it
            pool = np.union1d(np.arange(W.size, dtype=np.int64), evaluate_many(g, xs))
        consts.update(_fiber_of_shift(S, pool, a, b, c))
    if not consts:
        raise CoverError("no constants survive pruning")
    out = Cover.product_form(S, polys, sorted(consts))
    if not verify_cover(W, out, target):
        raise CoverError("pruned cover failed re-verification")
    return out


def phi_witness(S, phi, b):
    """b^-1 = b a1 b^2 a2 ... b^2 a_{n-1} b for pruned phi with phi(b^2) = b."""
    inner = phi.coeffs[1:-1]
    if not inner:
        return b
    bb = S.mul(b, b)
    acc = b
    for i, a in enumerate(inner):
        acc = S.mul_ext(acc, a)
        if i < len(inner) - 1:
            acc = S.mul(acc, bb)
    return S.mul(acc, b)


class RegularizationError(CoverError):
    pass


def regularize_cover(cover, W=None, target=None, max_rounds=1000):
    """Make every constant regular, following the minimal-B argument.

    While some constant b has no phi in F with phi(b^2) = b, pick phi with
    phi(b^2) in B minus {b}, add phi o s o phi to F (s(x) = xx) and drop b,
    provided the smaller cover still verifies.  If no such replacement
    verifies, b is dropped outright when F x (B - {b}) still covers.
    Regularity of the final constants is re-checked by brute force.
    """
    S = cover.semigroup
    if not S.is_finite:
        raise CoverError("regularization needs a finite handle")
    W = W or S.window()
    if not all(is_pruned(f) for f in cover.polys):
        raise CoverError("regularization expects a pruned cover")
    F, B = cover.polys, cover.constants
    if not verify_cover(W, Cover.product_form(S, F, B), target):
        raise CoverError("input cover does not verify")
    s = square_poly(S)

    def covers(F2, B2):
        return bool(B2) and verify_cover(W, Cover.product_form(S, F2, B2), target).verified

    for _ in range(max_rounds):
        changed = False
        for b in B:
            bb = S.mul(b, b)
            if any(evaluate(phi, bb) == b for phi in F):
                continue
            rest = [c for c in B if c != b]
            for phi in F:
                if evaluate(phi, bb) not in rest:
                    continue
                new = compose(phi, compose(s, phi))
                F2 = F if new in F else F + [new]
                if covers(F2, rest):
                    log.debug("constant %d replaced via %s", b, render(phi))
                    F, B, changed = F2, rest, True
                    break
            if not changed and covers(F, rest):
                F, B, changed = F, rest, True
            if changed:
                break
        if not changed:
            break
    out = Cover.product_form(S, F, B)
    regular = {x for x, _ in structure.regular_elements(S.window())}
    bad = [b for b in B if b not in regular]
    if bad:
        raise RegularizationError(f"constants {bad} are not regular after regularization")
    return out


def constant_witnesses(cover):
    """For each constant b, a pair (phi, w) with phi(b^2) = b and b w b = b."""
    S = cover.semigroup
    out = {}
    for b in cover.constants:
        bb = S.mul(b, b)
        for phi in cover.polys:
            if is_pruned(phi) and evaluate(phi, bb) == b:
                w = phi_witness(S, phi, b)
                if S.mul(S.mul(b, w), b) == b:
                    out[b] = (phi, w)
                    break
    return out


# --------------------------------------------------------------------------
# transport through quotients and products


def _check_hom(S, T, q):
    if len(q) != S.order:
        raise CoverError("map must be defined on every element")
    if set(q) != set(range(T.order)):
        raise CoverError("quotient map is not surjective")
    rows = as_table(S)
    for a in range(S.order):
        for b in range(S.order):
            if q[rows[a][b]] != T.mul(q[a], q[b]):
                raise CoverError(f"map is not a homomorphism at ({a},{b})")


def transport_quotient(cover, q, Q):
    """Push a cover of X through a surjective homomorphism q: X -> Q."""
    S = cover.semigroup
    if not S.is_finite:
        raise CoverError("transport is computed for finite handles")
    if not verify_cover(S.window(), cover):
        raise CoverError("input cover does not verify")
    _check_hom(S, Q, q)
    pairs = []
    for f, b in cover.pairs:
        if any(isinstance(c, tuple) for c in f.coeffs):
            raise CoverError("mixed coefficients cannot be transported")
        g = PolyTerm(Q, tuple(None if c is None else q[c] for c in f.coeffs))
        pair = (g, q[b])
        if pair not in pairs:
            pairs.append(pair)
    out = Cover(Q, tuple(pairs))
    if not verify_cover(Q.window(), out):
        raise CoverError("transported cover failed verification")
    return out


def product_poly(P, f, g):
    """p_{f,g}(x, y) = (f(x)^deg g, g(y)^deg f) as a polynomial over P."""
    fx = poly_power(f, g.degree)
    gy = poly_power(g, f.degree)
    coeffs = tuple(P.join_ext(u, v) for u, v in zip(fx.coeffs, gy.coeffs))
    return PolyTerm(P, coeffs)


def product_cover(cX, cY, P=None, WX=None, WY=None, WP=None):
    """Cover of X x Y from covers of X and Y.

    Uses every p_{f,g} with constants (bX^deg g, bY^deg f) for all constants
    bX, bY; each p_{f,g} has degree deg f * deg g.
    """
    X, Y = cX.semigroup, cY.semigroup
    if P is None:
        P = product(X, Y)
    if not isinstance(P, ProductSemigroup) or P.left is not X or P.right is not Y:
        raise CoverError("product handle does not match the covers")
    for c, Wc in ((cX, WX), (cY, WY)):
        Wc = Wc or c.semigroup.window()
        if not verify_cover(Wc, c):
            raise CoverError(f"input cover on {c.semigroup.name} does not verify")
    pairs = []
    for f in cX.polys:
        for g in cY.polys:
            p = product_poly(P, f, g)
            for bx in cX.constants:
                for by in cY.constants:
                    const = P.pair_index(X.power(bx, g.degree), Y.power(by, f.degree))
                    pairs.append((p, const))
    out = Cover(P, tuple(pairs))
    WP = WP or P.window()
    if not verify_cover(WP, out):
        raise CoverError("product cover failed verification")
    return out


# --------------------------------------------------------------------------
# groups


def group_from_cover(W, cover):
    """Identity and inverses of a polybounded cancellative semigroup.

    The cover is pruned (and regularized on finite handles) first.  Each
    constant b gets a witness b' with b b' b = b; cancellativity forces
    b b' = e = b' b for a single idempotent e, which is checked to be the
    unit.  For x with pruned f(x) = x y = b, the inverse is y b'.
    """
    S = W.semigroup
    if not verify_cover(W, cover):
        raise CoverError("input cover does not verify")
    if not structure.is_cancellative(W):
        raise CoverError(f"{S.name} is not cancellative on the window")
    if not all(is_pruned(f) for f in cover.polys):
        cover = prune_cover(cover, W)
    if S.is_finite:
        cover = regularize_cover(cover, W)
        wit = {b: w for b, (_, w) in constant_witnesses(cover).items()}
    else:
        wit = {}
    reg = None
    for b in cover.constants:
        if b not in wit:
            if reg is None:
                reg = dict(structure.regular_elements(W))
            if b not in reg:
                raise CoverError(f"no regular witness for constant {b} in the window")
            wit[b] = reg[b]
    idem = {S.mul(b, w) for b, w in wit.items()} | {S.mul(w, b) for b, w in wit.items()}
    if len(idem) != 1:
        raise CoverError(f"idempotents {sorted(idem)} are not unique")
    e = idem.pop()
    if S.mul(e, e) != e:
        raise CoverError("extracted element is not idempotent")
    for x in W.elements:
        if S.mul(e, x) != x or S.mul(x, e) != x:
            raise CoverError(f"unit law fails at {x}")
    inverse = {}
    for x in W.elements:
        for f, b in cover.pairs:
            if evaluate(f, x) != b:
                continue
            if f.degree == 1:
                y = e
            else:
                y = evaluate(PolyTerm(S, f.coeffs[1:]), x)
            z = S.mul(y, wit[b])
            if S.mul(x, z) == e == S.mul(z, x):
                inverse[x] = z
                break
        else:
            raise CoverError(f"no inverse found for {x}")
    return GroupStructure(S, e, inverse)


def normalize_group_cover(cover, group=None):
    """Rewrite each (a0 x a1 ... x an, b) as (x a1 ... x (an b^-1 a0), e)."""
    S = cover.semigroup
    if group is not None:
        e = group.identity
        inv = group.inverse.get
    else:
        e = S.identity
        inv = S.inverse
    if e is None:
        raise CoverError(f"{S.name} has no known identity")
    pairs = []
    for f, b in cover.pairs:
        binv = inv(b)
        if binv is None:
            raise CoverError(f"no inverse known for {b}")
        c = f.coeffs
        last = S.mul_ext(S.mul_ext(c[-1], binv), c[0])
        g = PolyTerm(S, (None,) + c[1:-1] + (last,))
        pair = (g, e)
        if pair not in pairs:
            pairs.append(pair)
    return Cover(S, tuple(pairs))


# --------------------------------------------------------------------------
# center boundedness


@dataclass
class CenterBound:
    bound: int
    status: str                 # 'verified' or 'violation'
    exponents: dict             # z -> (m, m') with z^m = z^m'
    violations: list
    fiber_set: list
    max_degree: int
    cover_verdict: object

    @property
    def verified(self):
        return self.status == "verified"


def center_bound_check(W, cover):
    """Pigeonhole check that the window center is bounded.

    On central x, each f_i(x) equals a_i x^{p_i} with a_i the product of the
    coefficients.  With p = max p_i and F = union of {x in Z : a_i x = b_i},
    every central z must repeat a power within (1 + n|F|) p.
    """
    S = W.semigroup
    kind = S.shift_fibers()
    if isinstance(kind, tuple):
        raise CoverError(f"{S.name} has an infinite shift fiber at {kind[1:]}")
    Z = structure.center(W)
    zs = np.array(Z, dtype=np.int64)
    fibers = set()
    p = 0
    for f, b in cover.pairs:
        a = None
        for c in f.coeffs:
            a = S.mul_ext(a, c)
        p = max(p, f.degree)
        vals = zs if a is None else S.mul_array(a, zs)
        fibers.update(int(z) for z in zs[vals == b])
    bound = (1 + len(cover.pairs) * len(fibers)) * p
    exps, bad = {}, []
    for z in Z:
        seen = {}
        pw = z
        for k in range(1, bound + 1):
            if pw in seen:
                exps[z] = (seen[pw], k)
                break
            seen[pw] = k
            pw = S.mul(pw, z)
        else:
            bad.append(z)
    return CenterBound(bound, "violation" if bad else "verified", exps, bad,
                       sorted(fibers), p, verify_cover(W, cover, Z))
