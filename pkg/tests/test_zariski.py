"""Isolation certificates and discreteness reports."""

from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from polybound.catalog import catalog
from polybound.polybounded import verify_cover
from polybound.polynomial import PolyTerm, evaluate, parse_poly
from polybound.semigroup import (as_table, make_cyclic, make_int_plus, make_nat_plus,
                                 make_semidirect_pm, make_symmetric3, make_trivial, from_cayley)
from polybound.zariski import (IsolationCertificate, IsolationError, NotEqualConst,
                               NotEqualPoly, discreteness_report, format_certificate,
                               isolation_to_cover, membership, parse_certificate,
                               search_isolation, verify_isolation)

from oracles import eval_table_poly

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def literal_isolates(S, cert):
    """{a} = X minus the union of the fibers, straight from the table."""
    rows = as_table(S)
    outside = {x for x in range(S.order)
               if not any(eval_table_poly(rows, f.coeffs, x) == b for f, b in cert.pairs)}
    return outside == {cert.point}


def test_subbasic_membership():
    S = make_cyclic(4)
    f = parse_poly(S, "x . x")
    assert membership(NotEqualConst(f, 0), 1)
    assert not membership(NotEqualConst(f, 0), 2)
    g = parse_poly(S, "x")
    assert [x in NotEqualPoly(f, g) for x in range(4)] == [False, True, True, True]


def test_c4_point_two():
    S = from_cayley([[(i + j) % 4 for j in range(4)] for i in range(4)], identity=0)
    cert = search_isolation(S.window(), 2, 3, range(4), 4)
    assert cert is not None and cert.point == 2
    assert verify_isolation(S.window(), cert).exhaustive
    assert literal_isolates(S, cert)
    assert verify_cover(S.window(), isolation_to_cover(S.window(), cert)).exhaustive


def test_bad_certificates_are_refuted():
    S = make_cyclic(3)
    x = parse_poly(S, "x")
    # misses element 2
    v = verify_isolation(S.window(), IsolationCertificate(0, [(x, 1)]))
    assert not v.verified and v.witness == 2
    # covers the point itself
    v = verify_isolation(S.window(), IsolationCertificate(0, [(x, 0), (x, 1), (x, 2)]))
    assert not v.verified and v.witness == 0
    with pytest.raises(IsolationError):
        isolation_to_cover(S.window(), IsolationCertificate(0, [(x, 1)]))


def test_trivial_semigroup_has_empty_certificate():
    S = make_trivial()
    cert = search_isolation(S.window(), 0, 1, [0], 1)
    assert cert.pairs == ()
    assert verify_isolation(S.window(), cert).exhaustive
    assert isolation_to_cover(S.window(), cert).lines() == ["x = 0"]


def test_certificate_roundtrip():
    S = make_symmetric3()
    cert = search_isolation(S.window(), 4, 2, range(6), 6)
    text = format_certificate(cert)
    assert text.startswith("point=4\n")
    assert parse_certificate(S, text) == cert
    assert parse_certificate(S, "point=0\n") == IsolationCertificate(0, ())
    with pytest.raises(IsolationError):
        parse_certificate(S, "x = 1\n")
    with pytest.raises(IsolationError):
        parse_certificate(S, "point=zz\n")


def test_point_outside_window():
    with pytest.raises(IsolationError):
        search_isolation(make_nat_plus().window(10), 12, 1, [0], 1)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(catalog(max_order=4)), st.data())
def test_found_certificates_isolate_literally(S, data):
    a = data.draw(st.integers(0, S.order - 1))
    cert = search_isolation(S.window(), a, 2, range(S.order), S.order)
    assert cert is not None
    assert literal_isolates(S, cert)


def test_s3_report_all_isolated():
    S = make_symmetric3()
    rep = discreteness_report(S.window(), 2, range(6), 6)
    assert rep.all_isolated and rep.exhaustive
    assert "discrete" in rep.note


def test_int_plus_point_zero_not_isolated():
    W = make_int_plus().window(100)
    assert search_isolation(W, 0, 3, range(20), 6) is None


def test_nat_plus_report_is_inconclusive():
    rep = discreteness_report(make_nat_plus().window(60), 2, range(5), 3, points=[0, 1, 2])
    assert not any(p.isolated for p in rep.points)
    assert "inconclusive" in rep.note
