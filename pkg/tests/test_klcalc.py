import pytest

from braidkl.exactmath import IntPolynomial, stirling2
from braidkl.klcalc import (
    KLResult,
    KLValidationError,
    braid_kl,
    check_kl_axioms,
    kl_generic,
    kl_generic_braid,
    palindromic_complete,
    verify_theorem_main,
)
from braidkl.matroid import braid, direct_sum, loop, parallel_extension, uniform

from reference_data import QSP_COUNTS, SIMPLE_QSP_COUNTS

P = IntPolynomial


def test_palindromic_complete_examples():
    assert palindromic_complete(P([0, 6, 7, 1]), 3) == P([1, 1])
    assert palindromic_complete(P(), 0) == P([1])
    assert palindromic_complete(P([0, 1]), 1) == P([1])


def test_palindromic_complete_rejects_bad_tails():
    with pytest.raises(KLValidationError):
        palindromic_complete(P([0, 1]), 0)
    with pytest.raises(KLValidationError):
        palindromic_complete(P([0, 0, 0, 0, 1]), 3)
    with pytest.raises(KLValidationError):
        palindromic_complete(P([0, 5, 1, 1]), 3)


def test_tail_of_k4_from_stirling_counts():
    tail = sum((P.monomial(4 - k, stirling2(4, k)) * braid_kl(k).p for k in range(1, 4)), P())
    assert tail == P([0, 6, 7, 1])


def test_generic_examples():
    r = kl_generic(braid(4))
    assert r.p == P([1, 1]) and r.z == P([1, 7, 7, 1])
    for n in range(1, 6):
        assert kl_generic(uniform(n, n)).p == P([1])
    assert kl_generic(braid(5)).p == P([1, 5])
    with pytest.raises(ValueError):
        kl_generic(loop())


def test_generic_ignores_parallel_elements():
    m = braid(4)
    assert kl_generic(parallel_extension(m, 2)) == kl_generic(m)


def test_generic_on_uniform_matroids():
    # P of U_{3,4}: rank 3, tail from 4 points, 6 lines, 1 top
    assert kl_generic(uniform(3, 4)).p == P([1, 2])
    assert kl_generic(uniform(2, 5)).p == P([1])


def test_direct_sum_is_multiplicative():
    a, b = braid(4), uniform(3, 4)
    s = kl_generic(direct_sum(a, b))
    assert s.p == kl_generic(a).p * kl_generic(b).p
    assert s.z == kl_generic(a).z * kl_generic(b).z


def test_stirling_engine_examples():
    assert braid_kl(1) == KLResult(P([1]), P([1]), 0)
    assert braid_kl(3).p == P([1]) and braid_kl(3).z == P([1, 3, 1])
    assert braid_kl(6).p == P([1, 16, 15])
    assert braid_kl(8).p == P([1, 99, 1225, 735])
    with pytest.raises(ValueError):
        braid_kl(0)


def test_engines_agree():
    for n in range(1, 7):
        assert kl_generic_braid(n, "bases") == braid_kl(n)
    for n in range(1, 8):
        assert kl_generic_braid(n, "partition") == braid_kl(n)
    with pytest.raises(ValueError):
        kl_generic_braid(4, "other")


def test_axiom_checker():
    for n in range(1, 10):
        assert check_kl_axioms(braid_kl(n)) == []
    bad = KLResult(P([1, 1]), P([1, 2]), 1)
    assert check_kl_axioms(bad)


def test_main_comparison_examples():
    r = verify_theorem_main(4, SIMPLE_QSP_COUNTS[3], QSP_COUNTS[3])
    assert r["ok"] and r["p"] == [1, 1] and r["z"] == [1, 7, 7, 1]
    r2 = verify_theorem_main(2, SIMPLE_QSP_COUNTS[1], QSP_COUNTS[1])
    assert r2["ok"] and r2["p"] == [1]
    r7 = verify_theorem_main(7, SIMPLE_QSP_COUNTS[6], QSP_COUNTS[6])
    assert r7["ok"] and r7["p"] == [1, 42, 175]


def test_main_comparison_detects_mismatch():
    counts = list(SIMPLE_QSP_COUNTS[5])
    counts[3] += 1
    assert not verify_theorem_main(6, counts, QSP_COUNTS[5])["ok"]
