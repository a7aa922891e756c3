"""Semigroup polynomials x -> a0 x a1 x ... x an with coefficients in X^1."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .semigroup import Element, ProductSemigroup, SemigroupError, index_to_int


class PolynomialError(SemigroupError):
    pass


def _norm_coeff(S, c):
    if c is None:
        return None
    if isinstance(c, Element):
        return S.check(c)
    if isinstance(c, tuple):
        if not isinstance(S, ProductSemigroup) or len(c) != 2:
            raise PolynomialError(f"mixed coefficient {c!r} needs a product handle")
        u1 = None if c[0] is None else S.left.check(c[0])
        u2 = None if c[1] is None else S.right.check(c[1])
        return S.join_ext(u1, u2)
    return S.check(c)


@dataclass(frozen=True, eq=False)
class PolyTerm:
    """``coeffs[i]`` is a_i; ``None`` is the adjoined identity of X^1.

    Equality is structural: same handle object and same coefficient list.
    """

    semigroup: object
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(_norm_coeff(self.semigroup, c) for c in self.coeffs)
        if len(coeffs) < 2:
            raise PolynomialError("a polynomial has degree at least 1")
        object.__setattr__(self, "coeffs", coeffs)

    def __eq__(self, other):
        return (isinstance(other, PolyTerm) and self.semigroup is other.semigroup
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.semigroup), self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        return evaluate(self, x)

    def key(self):
        """Sort key: degree, then coefficients with the identity first."""
        return (self.degree, tuple(_coeff_key(c) for c in self.coeffs))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"PolyTerm({render(self)!r})"


def _coeff_key(c):
    if c is None:
        return (-1,)
    if isinstance(c, tuple):
        return (-1,) + tuple(-1 if u is None else u for u in c)
    return (c,)


def identity_poly(S):
    """f(x) = x."""
    return PolyTerm(S, (None, None))


def constant_free(S, coeffs):
    return PolyTerm(S, tuple(coeffs))


def evaluate(f, x):
    """Left-to-right product, skipping identity slots."""
    S = f.semigroup
    x = S.check(x)
    mul_ext = S.mul_ext
    acc = f.coeffs[0]
    for c in f.coeffs[1:]:
        acc = mul_ext(acc, x)
        acc = mul_ext(acc, c)
    return acc


def evaluate_many(f, xs):
    """Vectorized evaluation over an index array."""
    S = f.semigroup
    xs = np.asarray(xs, dtype=np.int64)
    if any(isinstance(c, tuple) for c in f.coeffs):
        return np.array([evaluate(f, int(x)) for x in xs], dtype=np.int64)
    acc = None
    for i, c in enumerate(f.coeffs):
        if i:
            acc = xs if acc is None else S.mul_array(acc, xs)
        if c is not None:
            acc = np.full(xs.shape, c, dtype=np.int64) if acc is None else S.mul_array(acc, c)
    return acc


def degree(f):
    return f.degree


def is_pruned(f):
    return f.coeffs[0] is None and f.coeffs[-1] is None


def prune_decompose(f):
    """Split f = a . g . b with g pruned; a, b in X^1."""
    a, b = f.coeffs[0], f.coeffs[-1]
    g = PolyTerm(f.semigroup, (None,) + f.coeffs[1:-1] + (None,))
    return a, g, b


def compose(f, g):
    """The polynomial x -> f(g(x)); its degree is deg f * deg g."""
    if f.semigroup is not g.semigroup:
        raise PolynomialError("cannot compose polynomials over different handles")
    S = f.semigroup
    m = S.mul_ext
    c = g.coeffs
    n = f.degree
    out = [m(f.coeffs[0], c[0])]
    for j in range(1, n + 1):
        out.extend(c[1:-1])
        if j < n:
            out.append(m(m(c[-1], f.coeffs[j]), c[0]))
        else:
            out.append(m(c[-1], f.coeffs[n]))
    return PolyTerm(S, tuple(out))


def poly_power(f, m):
    """x -> f(x)^m, written as a polynomial of degree m * deg f."""
    if m < 1:
        raise ValueError("powers start at 1")
    S = f.semigroup
    c = f.coeffs
    out = list(c)
    for _ in range(m - 1):
        out[-1] = S.mul_ext(out[-1], c[0])
        out.extend(c[1:])
    return PolyTerm(S, tuple(out))


def square_poly(S):
    """s(x) = xx."""
    return PolyTerm(S, (None, None, None))


def normalize_commutative(f):
    """(shift c, slope k) with f(x) = c + k x on (N,+) or (Z,+).

    ``c`` is returned as an integer value, not an enumeration index.
    """
    S = f.semigroup
    if S.additive == "nat":
        value = int
    elif S.additive == "int":
        value = index_to_int
    else:
        raise PolynomialError(f"{S.name} has no additive normal form")
    shift = sum(value(c) for c in f.coeffs if c is not None)
    return shift, f.degree


# --------------------------------------------------------------------------
# textual syntax:  a0 . x . a1 . x . a2   ('id' or an omitted slot = identity)

_TOKEN = re.compile(r"^(x|id|\d+|\((id|\d+),(id|\d+)\))$")


def parse_poly(S, text):
    """Parse ``a0 . x . a1 . x . a2``.

    Tokens are ``x``, ``id`` (the adjoined identity) or element indices.
    Adjacent coefficients are multiplied; omitted slots are the identity.
    """
    tokens = [t.replace(" ", "") for t in text.split(".")]
    slots = [None]
    saw_x = False
    for pos, tok in enumerate(tokens):
        if not _TOKEN.match(tok):
            raise PolynomialError(f"bad token {tok!r} at position {pos} in {text!r}")
        if tok == "x":
            slots.append(None)
            saw_x = True
        elif tok.startswith("("):
            u1, u2 = (None if u == "id" else int(u) for u in tok[1:-1].split(","))
            slots[-1] = S.mul_ext(slots[-1], _norm_coeff(S, (u1, u2)))
        elif tok != "id":
            slots[-1] = S.mul_ext(slots[-1], S.check(int(tok)))
    if not saw_x:
        raise PolynomialError(f"{text!r} has no variable x")
    return PolyTerm(S, tuple(slots))


def _render_coeff(c):
    if isinstance(c, tuple):
        return "(" + ",".join("id" if u is None else str(u) for u in c) + ")"
    return str(c)


def render(f):
    parts = []
    for i, c in enumerate(f.coeffs):
        if i:
            parts.append("x")
        if c is not None:
            parts.append(_render_coeff(c))
    return " . ".join(parts)


def render_pretty(f):
    """Human-readable form using the handle's element names."""
    S = f.semigroup
    parts = []
    for i, c in enumerate(f.coeffs):
        if i:
            parts.append("x")
        if c is None:
            continue
        if isinstance(c, tuple):
            parts.append("(" + ",".join(
                "1" if u is None else side.render(u)
                for u, side in zip(c, (S.left, S.right))) + ")")
        else:
            parts.append(S.render(c))
    return "·".join(parts)
