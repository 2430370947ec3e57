import pytest

from pertalg.algebra import TruncatedSeries, element
from pertalg.catalog import CATALOG, Identity, IdentityReport, evaluate_identity, first_discrepancy, verify_catalog
from pertalg.scalars import GF

IDS = ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "D1", "D2", "BERG", "PHI-REL", "PHI-INV",
       "PHI-COMOD", "HPL", "XI-MC", "XI-PRIM", "G1", "G2", "G3", "G4", "GAUGE", "RHO-G", "ISO"]


def test_catalog_covers_every_identity():
    assert [i.identity_id for i in CATALOG] == IDS


@pytest.mark.parametrize("cap", range(7))
def test_catalog_passes(cap):
    reports = verify_catalog(cap)
    assert [r.identity_id for r in reports] == IDS
    bad = [r for r in reports if not r.passed]
    assert not bad
    assert all(r.cap == cap and r.witness is None for r in reports)


def test_catalog_prime_field():
    assert all(r.passed for r in verify_catalog(4, GF(101)))


def test_negative_cap_rejected():
    with pytest.raises(ValueError):
        verify_catalog(-1)


def test_wrong_identity_reports_lowest_witness():
    # the sign of the middle term is wrong: 1 + x alpha s
    wrong = Identity("BAD", "beta = 1 + x alpha s",
                     lambda c: [(c.beta, c.one + c.x * c.alpha * c.s)])
    r = evaluate_identity(wrong, 4)
    assert not r.passed
    assert r.witness == {"word": "xs", "coeff": "-2", "x_count": 1, "part": 0}


def test_literal_sum_form_of_beta_fails_at_first_order():
    # (1+xs)^-1 = x(1+sx)^-1 s + 1 taken literally differs by 2xs at x-count 1
    literal = Identity("BERG-literal", "", lambda c: [(c.beta, c.x * c.alpha * c.s + c.one)])
    r = evaluate_identity(literal, 3)
    assert r.status == "fail" and r.witness["x_count"] == 1 and r.witness["word"] == "xs"


def test_report_invariant():
    with pytest.raises(ValueError):
        IdentityReport("X", "pass", 1, {"word": "s"})
    with pytest.raises(ValueError):
        IdentityReport("X", "fail", 1, None)
    assert IdentityReport("X", "pass", 2).to_dict() == {"identity": "X", "status": "pass", "cap": 2,
                                                        "witness": None}


def test_first_discrepancy_orders_by_xcount_then_word():
    a = TruncatedSeries(4, element({"xsx": 1, "x": 2, "s": 1}))
    b = TruncatedSeries(4, element({}))
    assert first_discrepancy(a, b, 4) == {"word": "s", "coeff": "1", "x_count": 0}
    assert first_discrepancy(a, a, 4) is None
