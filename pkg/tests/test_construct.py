from math import gcd

import pytest

from b1sets.bset import BSet, classify_L, classify_U, verify
from b1sets.construct import (
    BaseProvider,
    BaseUnavailable,
    dispatch,
    m4_prime_formula,
    thm1_build,
    thm2_build,
    thm2_part,
    thm3_build,
    thm4_build,
    thm4_part,
    thm5_a_part,
    thm5_build,
    thm5_deficit,
    thm5_formula_size,
    thm5_t_part,
)
from b1sets.numtheory import divisors, euler_phi, factor_shape
from b1sets.oracle import max_bset_exact

EX1_240 = (
    1, 5, 8, 9, 13, 17, 21, 25, 29, 33, 37, 41, 45, 49, 53, 56, 57, 183, 187, 191,
    195, 199, 203, 207, 211, 215, 219, 223, 227, 231, 235, 239,
)
EX2_120 = (8, 17, 19, 21, 23, 25, 27, 29, 31, 33, 35, 37, 39, 41, 43, 45, 56)
EX3_60 = (1, 5, 6, 7, 11, 13, 17, 19, 23, 29, 54, 55)
EX3_84 = (1, 5, 6, 7, 11, 13, 17, 19, 23, 25, 31, 37, 71, 77, 78, 83)


def empty(q):
    return BSet(q, ())


def test_thm1_examples():
    assert thm1_build(48, BSet(6, (1,))).elements == (1, 5, 8, 9, 39, 43, 47)
    assert thm1_build(240, BSet(30, (1, 7))).elements == EX1_240


def test_thm1_with_searched_base():
    base = max_bset_exact(12).witness
    assert len(base) == 2
    out = thm1_build(96, base)
    assert verify(96, 4, out.elements) and len(out) == 14


def test_thm1_classes():
    for q in (48, 80, 112, 144, 176, 240, 336, 432, 1040):
        s = factor_shape(q)
        S = thm1_build(s, empty(q // 8)).elements
        assert len(S) == q // 8
        for x in S:
            assert classify_L(s, x) == 0
            assert classify_L(s, 2 * x) == 1
            assert classify_L(s, 3 * x) == 0
            assert classify_L(s, 4 * x) == 2


def test_thm2_examples():
    assert thm2_build(120, BSet(15, (1, 7))).elements == EX2_120
    s = factor_shape(120)
    assert thm2_part(s, 0, 1) == [45]
    assert thm2_part(s, 1, 1) == [35, 25]
    assert sorted(thm2_part(s, 0, 5)) == [21, 27, 33, 39]
    assert thm2_part(s, 1, 5) == [31, 37, 41, 43, 17, 19, 23, 29]


def test_thm2_over_zero_base_at_24():
    # {1} is not a B1[4](3) set (3*1 == 0 == ...), M4(3) = 0, so M4(24) = 0 + 3
    assert not verify(3, 4, [1])
    out = thm2_build(24, empty(3))
    assert verify(24, 4, out.elements) and len(out) == 3
    assert max_bset_exact(24).max_size == 3


def test_thm2_part_sizes():
    for q in (24, 72, 216, 120, 168, 360, 1080):
        s = factor_shape(q)
        for d in divisors(s.r):
            for j in range(s.b + 1):
                want = euler_phi(d) if j == 0 else 2 * 3 ** (j - 1) * euler_phi(d)
                assert len(thm2_part(s, j, d)) == want


@pytest.mark.parametrize(
    "d, n, value", [(5, 4, 2), (11, 10, 6), (13, 12, 8), (7, 3, 2), (1, 1, 0)]
)
def test_prime_formula(d, n, value):
    assert m4_prime_formula(d, n).value == value
    assert m4_prime_formula(d).value == value


def test_thm3_examples():
    assert thm3_build(39).elements == (1, 5, 7, 8, 17, 19, 25, 35)
    assert thm3_build(3).elements == ()
    for q, size in ((15, 2), (21, 2), (33, 6)):
        out = thm3_build(q)
        assert len(out) == size and verify(q, 4, out.elements)


def test_thm3_sizes_and_validity():
    for r in range(1, 700):
        if gcd(r, 6) != 1:
            continue
        notes = []
        out = thm3_build(3 * r, notes=notes)
        assert verify(3 * r, 4, out.elements), r
        assert len(out) == sum(m4_prime_formula(d).value for d in divisors(r)), r
        assert notes == [], r


def test_thm4_examples():
    s60 = factor_shape(60)
    assert sorted(thm4_part(s60, 1)) == [5, 55]
    assert sorted(thm4_part(s60, 5)) == [1, 7, 11, 13, 17, 19, 23, 29]
    assert sorted(thm4_part(factor_shape(84), 7)) == [1, 5, 11, 13, 17, 19, 23, 25, 31, 37, 71, 83]
    assert thm4_build(60, BSet(10, (1, 9))).elements == EX3_60
    assert thm4_build(84, BSet(14, (1, 13))).elements == EX3_84


def test_thm4_classes():
    for r in (1, 5, 7, 11, 13, 25, 35, 55, 77):
        q = 12 * r
        s = factor_shape(q)
        A = thm4_build(s, empty(2 * r)).elements
        assert len(A) == 2 * r
        for d in divisors(r):
            assert len(thm4_part(s, d)) == 2 * euler_phi(d)
        for x in A:
            assert classify_U(s, x) == (0, 0)
            assert classify_U(s, 2 * x) == (1, 0)
            assert classify_U(s, 3 * x) == (0, 1)
            assert classify_U(s, 4 * x) == (2, 0)


def test_thm5_example_54():
    s = factor_shape(54)
    assert thm5_build(s, empty(2)).elements == (1, 5, 6, 7, 47, 48, 49, 53)
    assert sorted(thm5_a_part(s, 1)) == [1, 5, 7, 47, 49, 53]
    case, t = thm5_t_part(s, 1)
    assert case == 1 and sorted(t) == [1, 8]
    assert thm5_deficit(s) == 1
    assert thm5_formula_size(s, 0) == 7


def test_thm5_deficit_values():
    # b=3, r=7: ord_7(2)=3 is divisible by 3, so only d=1 counts
    assert thm5_deficit(378) == 1


def test_thm5_sizes():
    for q in (54, 162, 270, 378, 486, 594, 702, 1134, 1458, 2106, 3078):
        s = factor_shape(q)
        base = max_bset_exact(q // 27).witness if q // 27 <= 60 else empty(q // 27)
        out = thm5_build(s, base)
        assert verify(q, 4, out.elements), q
        A = [x for d in divisors(s.r) for x in thm5_a_part(s, d)]
        assert len(A) == 2 * 3 ** (s.b - 2) * s.r


def test_thm5_at_162():
    out = thm5_build(162, BSet(6, (1,)))
    assert verify(162, 4, out.elements)
    assert len(out) == 18 + 5 + 1
    assert max_bset_exact(162).max_size >= len(out)


def test_constructions_reject_other_lambda():
    with pytest.raises(ValueError):
        thm1_build(48, BSet(6, (1,), lam=3))


def test_dispatch_reports():
    b, rep = dispatch(48)
    assert len(b) == 7 and rep.exactness == "exact"
    assert [s.theorem for s in rep.steps] == ["thm1", "base"]
    assert rep.steps[1].q == 6
    b, rep = dispatch(120)
    assert b.elements == EX2_120 and rep.exact
    assert [s.theorem for s in rep.steps] == ["thm2", "thm3"]
    b, rep = dispatch(54)
    assert len(b) == 8 and rep.exactness == "lower-bound"
    assert rep.discrepancy and rep.formula_size == 7 and rep.predicted_size == 8
    b, rep = dispatch(96)
    assert len(b) == 14 and rep.exact
    assert dispatch(240)[1].exactness == "lower-bound"


def test_dispatch_rejects_tiny_modulus():
    with pytest.raises(ValueError):
        dispatch(1)


def test_dispatch_without_search_names_the_modulus():
    with pytest.raises(BaseUnavailable) as err:
        dispatch(11, BaseProvider(use_oracle=False))
    assert err.value.q == 11


def test_dispatch_uses_set_files(tmp_path):
    (tmp_path / "b.json").write_text('{"q": 22, "lambda": 4, "elements": [1, 5]}')
    b, rep = dispatch(22 * 12 // 2, BaseProvider(base_dir=tmp_path, use_oracle=False))
    assert verify(b.q, 4, b.elements)
    assert rep.steps[-1].source == "user-file" and rep.exactness == "lower-bound"


def _supported(q):
    s = factor_shape(q)
    return (
        s.a >= 4
        or (s.a == 3 and s.b >= 1)
        or (s.a == 0 and s.b == 1)
        or (s.a == 2 and s.b == 1)
        or (s.a == 1 and s.b >= 3)
    )


def test_dispatch_verifies_up_to_400():
    for q in range(2, 401):
        if not _supported(q):
            continue
        b, rep = dispatch(q)
        assert verify(q, 4, b.elements), q
        assert rep.predicted_size == len(b)
        theorems = {s.theorem for s in rep.steps}
        if rep.exact:
            assert theorems <= {"thm1", "thm2", "thm3", "base"}
