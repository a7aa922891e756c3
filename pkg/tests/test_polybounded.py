"""Cover verification, search, pruning, regularization, transport, groups."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polybound import structure
from polybound.catalog import catalog
from polybound.polybounded import (Cover, CoverError, center_bound_check, constant_witnesses,
                                   format_cover, group_from_cover, normalize_group_cover,
                                   parse_cover, prune_cover, regularize_cover, search_cover,
                                   transport_quotient, product_cover, trivial_finite_cover,
                                   verify_cover)
from polybound.polynomial import PolyTerm, evaluate, is_pruned, parse_poly
from polybound.search import SearchGuardExceeded, build_pair_table
from polybound.semigroup import (as_table, make_cyclic, make_int_plus, make_left_zero,
                                 make_nat_plus, make_semidirect_pm, make_semilattice,
                                 make_symmetric3, product)

from oracles import brute_inverses, brute_regular, literal_covers

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
SMALL = [S for S in catalog(max_order=3)]


def pairs_of(cover):
    return [(f.coeffs, b) for f, b in cover.pairs]


# verification

def test_example_cover_on_zpm():
    G = make_semidirect_pm()
    cover = parse_cover(G, (SAMPLES / "ex.cover").read_text())
    assert len(cover) == 1 and cover.pairs[0][1] == G.identity
    v = verify_cover(G.window(1000), cover)
    assert v.verified and v.scope == "window"


def test_counterexample_is_least_uncovered_element():
    S = make_cyclic(5)
    cover = Cover(S, [(parse_poly(S, "x"), 0), (parse_poly(S, "x"), 1), (parse_poly(S, "x"), 3)])
    v = verify_cover(S.window(), cover)
    assert not v.verified and v.witness == 2


def test_target_restricts_verification():
    S = make_cyclic(5)
    cover = Cover(S, [(parse_poly(S, "x"), 0)])
    assert verify_cover(S.window(), cover, target=[0]).exhaustive


@pytest.mark.parametrize("S", catalog(), ids=lambda S: S.name)
def test_trivial_cover_verifies_exhaustively(S):
    cover = trivial_finite_cover(S)
    assert verify_cover(S.window(), cover).exhaustive
    assert literal_covers(as_table(S), pairs_of(cover), range(S.order))


def test_cover_file_roundtrip():
    S = make_symmetric3()
    cover = Cover(S, [(parse_poly(S, "1 . x . x . 2"), 3), (parse_poly(S, "x"), 0)])
    assert parse_cover(S, format_cover(cover)) == cover
    with pytest.raises(CoverError):
        parse_cover(S, "x . x\n")
    with pytest.raises(CoverError):
        parse_cover(S, "x = q\n")
    with pytest.raises(CoverError):
        parse_cover(S, "# only a comment\n")


def test_cover_rejects_foreign_polys():
    with pytest.raises(CoverError):
        Cover(make_cyclic(2), [(parse_poly(make_cyclic(2), "x"), 0)])


# search

def test_search_c2():
    S = make_cyclic(2)
    cover = search_cover(S.window(), 2, [0, 1], 3)
    assert cover.lines() == ["x = 0", "x = 1"]


def test_search_single_pair():
    # with a single pair allowed, only x x = 0 covers C2
    S = make_cyclic(2)
    cover = search_cover(S.window(), 2, [0, 1], 1)
    assert cover.lines() == ["x . x = 0"]


def test_search_nat_finds_nothing():
    W = make_nat_plus().window(200)
    assert search_cover(W, 3, range(11), 5) is None


def test_nat_fibers_are_singletons():
    # every candidate is x -> c + k x with k >= 1, hence injective, so a
    # cover with s pairs reaches at most s elements
    import itertools
    slots = [0] + list(range(11))          # 0 stands for an empty slot here
    for d in range(1, 4):
        for coeffs in itertools.product(slots, repeat=d + 1):
            vals = [sum(coeffs) + d * x for x in range(200)]
            assert len(set(vals)) == 200
    table = build_pair_table(make_nat_plus().window(200), 3, range(11))
    assert table.max_fiber == 1


def test_search_guard():
    with pytest.raises(SearchGuardExceeded):
        search_cover(make_nat_plus().window(50), 4, range(40), 3, guard=1000)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(catalog(max_order=4)), st.integers(1, 3))
def test_search_results_verify_literally(S, size):
    cover = search_cover(S.window(), 2, range(S.order), size)
    if cover is not None:
        assert len(cover) <= size
        assert literal_covers(as_table(S), pairs_of(cover), range(S.order))


# pruning and regularization

def _fibers_preserved(old, new, elements):
    for x in elements:
        if any(evaluate(f, x) == b for f, b in old.pairs):
            assert any(evaluate(f, x) == b for f, b in new.pairs)


def test_prune_s3_cover():
    S = make_symmetric3()
    cover = Cover(S, [(parse_poly(S, f"1 . x . x . {g}"), b) for g in range(6) for b in range(6)])
    pruned = prune_cover(cover, S.window())
    assert all(is_pruned(f) for f in pruned.polys)
    assert verify_cover(S.window(), pruned).exhaustive
    _fibers_preserved(cover, pruned, range(6))


def test_prune_c4_cover():
    S = make_cyclic(4)
    cover = Cover(S, [(parse_poly(S, "1 . x . x . 3"), b) for b in range(4)]
                  + [(parse_poly(S, "x"), b) for b in range(4)])
    pruned = prune_cover(cover, S.window())
    assert all(is_pruned(f) for f in pruned.polys)
    assert verify_cover(S.window(), pruned).exhaustive
    _fibers_preserved(cover, pruned, range(4))


def test_prune_zpm_example():
    G = make_semidirect_pm()
    W = G.window(300)
    cover = parse_cover(G, (SAMPLES / "ex.cover").read_text())
    pruned = prune_cover(cover, W)
    assert all(is_pruned(f) for f in pruned.polys)
    assert verify_cover(W, pruned).verified


def test_prune_refuses_infinite_fibers():
    from polybound.semigroup import make_taimanov
    T = make_taimanov()
    cover = Cover(T, [(parse_poly(T, "x . x"), 0), (parse_poly(T, "x . x"), 1)])
    with pytest.raises(CoverError):
        prune_cover(cover, T.window(50))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(catalog(max_order=4)))
def test_regularize_makes_constants_regular(S):
    cover = search_cover(S.window(), 2, range(S.order), 4)
    if cover is None:
        return
    reg = regularize_cover(prune_cover(cover, S.window()), S.window())
    assert verify_cover(S.window(), reg).exhaustive
    regular = brute_regular(as_table(S))
    assert set(reg.constants) <= regular
    for b, (phi, w) in constant_witnesses(reg).items():
        assert evaluate(phi, S.mul(b, b)) == b
        assert S.mul(S.mul(b, w), b) == b


def test_regularize_drops_nonregular_constant():
    # null semigroup with a unit: {0, 1} with 1*1 = 0 is not regular at 1
    S = make_semilattice(3)
    cover = trivial_finite_cover(S)
    reg = regularize_cover(cover, S.window())
    assert set(reg.constants) <= brute_regular(as_table(S))


# transport

def test_transport_c4_to_c2():
    C4, C2 = make_cyclic(4), make_cyclic(2)
    q = [x % 2 for x in range(4)]
    out = transport_quotient(trivial_finite_cover(C4), q, C2)
    assert verify_cover(C2.window(), out).exhaustive
    assert out.constants == [0, 1]


def test_transport_rejects_non_homomorphism():
    C4, C2 = make_cyclic(4), make_cyclic(2)
    with pytest.raises(CoverError):
        transport_quotient(trivial_finite_cover(C4), [0, 0, 1, 1], C2)


def test_transport_through_every_quotient_of_s3():
    S = make_symmetric3()
    for C in structure.enumerate_congruences(S):
        Q, q = structure.quotient_by_congruence(S, C)
        assert verify_cover(Q.window(), transport_quotient(trivial_finite_cover(S), q, Q)).exhaustive


def test_product_cover_c2_c2():
    C2a, C2b = make_cyclic(2), make_cyclic(2)
    out = product_cover(trivial_finite_cover(C2a), trivial_finite_cover(C2b))
    P = out.semigroup
    assert verify_cover(P.window(), out).exhaustive
    assert literal_covers(as_table(P), pairs_of(out), range(P.order))


def test_product_cover_degrees_multiply():
    X, Y = make_cyclic(3), make_left_zero(2)
    cX = Cover(X, [(parse_poly(X, "x . x"), b) for b in range(3)])
    cY = Cover(Y, [(parse_poly(Y, "x . x . x"), b) for b in range(2)])
    out = product_cover(cX, cY)
    assert {f.degree for f in out.polys} == {6}
    assert verify_cover(out.semigroup.window(), out).exhaustive


def test_product_cover_on_infinite_factor_window():
    G = make_semidirect_pm()
    cG = parse_cover(G, (SAMPLES / "ex.cover").read_text())
    C2 = make_cyclic(2)
    P = product(G, C2)
    out = product_cover(cG, trivial_finite_cover(C2), P, WX=G.window(200), WP=P.window(200))
    assert verify_cover(P.window(400), out).verified


# groups

@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_group_extraction_cyclic(n):
    S = make_cyclic(n)
    g = group_from_cover(S.window(), trivial_finite_cover(S))
    assert g.identity == 0
    assert g.inverse == {k: (-k) % n for k in range(n)}


def test_group_extraction_s3():
    S = make_symmetric3()
    g = group_from_cover(S.window(), trivial_finite_cover(S))
    assert g.identity == 0 and g.inverse == brute_inverses(as_table(S))


def test_group_extraction_rejects_non_cancellative():
    S = make_left_zero(2)
    with pytest.raises(CoverError):
        group_from_cover(S.window(), trivial_finite_cover(S))


def test_normalized_group_cover():
    S = make_symmetric3()
    cover = Cover(S, [(parse_poly(S, f"{a} . x . x . 1"), b) for a in range(6) for b in range(6)])
    out = normalize_group_cover(cover)
    assert set(out.constants) == {0}
    assert verify_cover(S.window(), out).exhaustive
    G = make_semidirect_pm()
    ex = parse_cover(G, (SAMPLES / "ex.cover").read_text())
    assert verify_cover(G.window(500), normalize_group_cover(ex)).verified


# center bound

def test_center_bound_c6():
    S = make_cyclic(6)
    res = center_bound_check(S.window(), trivial_finite_cover(S))
    assert res.verified and res.max_degree == 1
    for z, (m, m2) in res.exponents.items():
        assert S.power(z, m) == S.power(z, m2) and m2 <= res.bound


def test_center_bound_nat_violation():
    S = make_nat_plus()
    cover = Cover(S, [(parse_poly(S, "x"), b) for b in range(5)])
    res = center_bound_check(S.window(100), cover)
    assert not res.verified and res.violations
    assert not res.cover_verdict.verified


def test_center_bound_refuses_infinite_fibers():
    from polybound.semigroup import make_taimanov
    T = make_taimanov()
    with pytest.raises(CoverError):
        center_bound_check(T.window(20), Cover(T, [(parse_poly(T, "x"), 0)]))
