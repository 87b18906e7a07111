import json
from pathlib import Path

import pytest

from ricperp import cspace
from ricperp.cspace import CSpaceDescriptor as D
from ricperp.errors import OutOfTheoremRange, UnsupportedFamilyRank

GOLDEN = Path(__file__).parent / "data" / "bcd_r10.json"


def test_small_root_lists():
    assert cspace.positive_roots("A", 2) == [(0, 1), (1, 0), (1, 1)]
    assert len(cspace.positive_roots("B", 2)) == 4
    assert len(cspace.positive_roots("G2", 2)) == 6


@pytest.mark.parametrize("r", range(1, 11))
def test_classical_root_counts(r):
    assert len(cspace.positive_roots("A", r)) == r * (r + 1) // 2
    if r >= 2:
        assert len(cspace.positive_roots("B", r)) == r * r
    if r >= 3:
        assert len(cspace.positive_roots("C", r)) == r * r
    if r >= 4:
        assert len(cspace.positive_roots("D", r)) == r * (r - 1)


@pytest.mark.parametrize("fam,count", [("E6", 36), ("E7", 63), ("E8", 120), ("F4", 24), ("G2", 6)])
def test_exceptional_root_counts(fam, count):
    assert len(cspace.positive_roots(fam, cspace.EXCEPTIONAL_RANK[fam])) == count


def test_highest_roots():
    assert cspace.positive_roots("E8", 8)[-1] == (2, 3, 4, 6, 5, 4, 3, 2)
    assert cspace.positive_roots("F4", 4)[-1] == (2, 3, 4, 2)
    assert cspace.positive_roots("G2", 2)[-1] == (3, 2)


def test_grassmannian_dimensions():
    for r in range(1, 13):
        for i in range(1, r + 1):
            assert cspace.cspace_dimension(D("A", r, i)) == i * (r + 1 - i)


def test_delta_plus_k():
    assert cspace.delta_plus_k(D("A", 2, 1), 1) == [(1, 0), (1, 1)]
    assert cspace.delta_plus_k(D("B", 3, 2), 2)
    assert cspace.delta_plus_k(D("B", 3, 2), 3) == []


def test_named_spaces():
    assert cspace.cspace_dimension(D("B", 3, 2)) == 7
    assert cspace.cspace_dimension(D("C", 3, 3)) == 6
    assert cspace.cspace_dimension(D("E6", 6, 1)) == 16
    assert cspace.cspace_dimension(D("E7", 7, 7)) == 27


def test_einstein_constants():
    assert cspace.einstein_constant(D("B", 3, 2)) == 4
    assert cspace.einstein_constant(D("C", 3, 3)) == 4
    assert cspace.einstein_constant(D("F4", 4, 2)) == "unstated"
    assert cspace.einstein_constant(D("A", 4, 2)) == 5
    assert cspace.einstein_constant(D("E7", 7, 7)) == 18


def test_qb_verdict_examples():
    assert cspace.qb_verdict(D("B", 3, 2)) == "positive"
    with pytest.raises(OutOfTheoremRange):
        cspace.qb_verdict(D("C", 7, 7))
    assert cspace.qb_verdict(D("E7", 7, 4)) == "fails"
    assert cspace.qb_verdict(D("B", 9, 7)) == "nonneg_boundary"  # 36 = 36


def test_ricperp_verdict_examples():
    assert cspace.ricperp_verdict(D("A", 1, 1))[0] == "excluded_P1"
    assert cspace.ricperp_verdict(D("B", 5, 3)) == ("positive", "nu_lt_mu")
    assert cspace.ricperp_verdict(D("E8", 8, 5))[0] == "unknown_E0"
    assert cspace.ricperp_verdict(D("C", 3, 3)) == ("positive", "special_C3a3")
    assert cspace.ricperp_verdict(D("E6", 6, 3)) == ("positive", "qb_positive")


def test_descriptor_guards():
    with pytest.raises(UnsupportedFamilyRank):
        D("C", 2, 1)
    with pytest.raises(UnsupportedFamilyRank):
        D("E6", 7, 1)
    with pytest.raises(UnsupportedFamilyRank):
        D("A", 3, 4)
    with pytest.raises(UnsupportedFamilyRank):
        cspace.positive_roots("H", 3)


def test_classify_range():
    recs = cspace.classify_range(cspace.CLASSICAL, 5)
    assert len(recs) == 50
    assert recs == cspace.classify_range(cspace.CLASSICAL, 5)
    assert cspace.classify_range([], 10) == []


def test_golden_bcd():
    golden = json.loads(GOLDEN.read_text())
    recs = cspace.classify_range(["B", "C", "D"], 10)
    got = [
        {
            "family": r.descriptor.family,
            "rank": r.descriptor.rank,
            "node": r.descriptor.node,
            "dimension": r.dimension,
            "qb_verdict": r.qb_verdict,
        }
        for r in recs
    ]
    assert got == golden


def test_qb_positive_implies_ricperp_positive():
    for rec in cspace.classify_range(cspace.FAMILIES, 12):
        if rec.qb_verdict == "positive":
            assert rec.ricperp_verdict == "positive"
        if rec.qb_verdict == "fails" and rec.descriptor.family not in cspace.CLASSICAL:
            assert rec.ricperp_verdict == "unknown_E0"
