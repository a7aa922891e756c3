"""Zariski subbasic sets and isolated-point certificates.

A point a is isolated in the Zariski T1 topology when
{a} = X minus a finite union of fibers f_i^-1(b_i).  Certificates are
searched over those generators only; sets {x : f(x) != g(x)} are available
for membership queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polybounded import Cover, covered_mask, parse_cover
from .polynomial import evaluate, evaluate_many, identity_poly, render
from .search import DEFAULT_GUARD, build_pair_table, search_least_cover, window_mask
from .semigroup import SemigroupError
from .verdict import EXHAUSTIVE, WINDOW, counterexample, verified


@dataclass(frozen=True)
class NotEqualConst:
    """{x : f(x) != b}"""
    f: object
    b: int

    def __contains__(self, x):
        return evaluate(self.f, x) != self.b


@dataclass(frozen=True)
class NotEqualPoly:
    """{x : f(x) != g(x)}"""
    f: object
    g: object

    def __contains__(self, x):
        return evaluate(self.f, x) != evaluate(self.g, x)


def membership(s, x):
    return x in s


class IsolationError(SemigroupError):
    pass


@dataclass(frozen=True)
class IsolationCertificate:
    point: int
    pairs: tuple

    # an empty pair list stands for the empty intersection X, which isolates
    # the point of a one-element semigroup

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def lines(self):
        return [f"point={self.point}"] + [f"{render(f)} = {b}" for f, b in self.pairs]


def verify_isolation(W, cert):
    """Both halves of {a} = X minus the union, over the window.

    The counterexample is the least offending element: the point itself if
    it lies in the union, else a window element outside it.
    """
    a = cert.point
    if evaluate_many_any(cert, np.array([a], dtype=np.int64))[0]:
        return counterexample(a, window=W.size, reason="point lies in the union")
    xs = np.arange(W.size, dtype=np.int64)
    hit = evaluate_many_any(cert, xs)
    if a < W.size:
        hit[a] = True
    if not hit.all():
        x = int(xs[np.argmin(hit)])
        return counterexample(x, window=W.size, reason="element escapes the union")
    return verified(EXHAUSTIVE if W.exhaustive else WINDOW, window=W.size)


def evaluate_many_any(cert, xs):
    hit = np.zeros(len(xs), dtype=bool)
    for f, b in cert.pairs:
        hit |= evaluate_many(f, xs) == b
    return hit


def search_isolation(W, a, degree_bound, coeff_pool, size_bound, guard=DEFAULT_GUARD,
                     table=None):
    """Least certificate isolating ``a`` within the bounds, or ``None``."""
    S = W.semigroup
    a = S.check(a)
    if a >= W.size:
        raise IsolationError(f"point {a} is outside the window")
    if table is None:
        table = build_pair_table(W, degree_bound, coeff_pool, guard=guard)
    target = window_mask(W) & ~(1 << a)
    if not target:
        return IsolationCertificate(a, ())
    chosen = search_least_cover(table, target, size_bound, exclude_mask=1 << a)
    if chosen is None:
        return None
    cert = IsolationCertificate(a, tuple((p.poly, p.constant) for p in chosen))
    assert verify_isolation(W, cert), "search produced an invalid certificate"
    return cert


def isolation_to_cover(W, cert):
    """Add (x, a) to an isolation certificate; the result covers the window."""
    if not verify_isolation(W, cert):
        raise IsolationError("certificate does not verify")
    S = W.semigroup
    pairs = tuple(cert.pairs) + ((identity_poly(S), cert.point),)
    cover = Cover(S, pairs)
    hit = covered_mask(cover, np.arange(W.size, dtype=np.int64))
    if not hit.all():
        raise IsolationError("cover from certificate does not verify")
    return cover


def parse_certificate(S, text):
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or not lines[0].startswith("point="):
        raise IsolationError("certificate must start with 'point=<index>'")
    try:
        a = S.check(int(lines[0][len("point="):]))
    except ValueError:
        raise IsolationError(f"bad point line {lines[0]!r}") from None
    if len(lines) == 1:
        return IsolationCertificate(a, ())
    cover = parse_cover(S, "\n".join(lines[1:]))
    return IsolationCertificate(a, cover.pairs)


def format_certificate(cert):
    return "\n".join(cert.lines()) + "\n"


@dataclass
class PointResult:
    point: int
    certificate: object      # IsolationCertificate or None
    verdict: object

    @property
    def isolated(self):
        return self.certificate is not None


@dataclass
class DiscretenessReport:
    window: object
    points: list
    exhaustive: bool
    note: str

    @property
    def all_isolated(self):
        return all(p.isolated for p in self.points)


def discreteness_report(W, degree_bound, coeff_pool, size_bound, points=None,
                        guard=DEFAULT_GUARD):
    """Search an isolation certificate for each point; never claims non-isolation."""
    table = build_pair_table(W, degree_bound, coeff_pool, guard=guard)
    results = []
    for a in (W.elements if points is None else points):
        cert = search_isolation(W, a, degree_bound, coeff_pool, size_bound, table=table)
        v = verify_isolation(W, cert) if cert is not None else None
        results.append(PointResult(a, cert, v))
    exhaustive = W.exhaustive and points is None
    all_iso = all(r.isolated for r in results)
    if all_iso and exhaustive:
        note = ("every point is isolated and the check is exhaustive: the Zariski T1 "
                "topology is discrete, so the semigroup is T1S-nontopologizable "
                "(finite T1 spaces are discrete)")
    elif all_iso:
        note = ("every tested point is isolated on the window; consistent with a discrete "
                "Zariski T1 topology, and with injective T1S-closedness if shifts are "
                "finite-to-one, but a window check is not a proof")
    elif not any(r.isolated for r in results):
        note = ("no point isolated within the search bounds; inconclusive, consistent "
                "with a non-discrete Zariski T1 topology such as the cofinite one")
    else:
        note = "some points isolated, others unknown within the search bounds"
    return DiscretenessReport(W, results, exhaustive, note)
