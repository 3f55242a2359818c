import math

import numpy as np
import pytest

from hoplab.errors import CapacityError, DomainError
from hoplab.laws import EntryLaw, InitialLaw
from hoplab.words import (
    HAVE_NUMBA,
    WeightScanReport,
    _direct_sum_py,
    canonicalize,
    class_table,
    count_equivalents,
    edge_multiplicities,
    enumerate_w,
    exact_moment,
    exact_moment_via_classes,
    limit_moment,
    max_weight_report,
    support,
    weight,
)

from oracles import brute_force_normalized_moment

RAD = EntryLaw("rademacher", sigma=0.5)
UNI = EntryLaw("uniform", sigma=0.5)
ASYM = EntryLaw("two_point_asymmetric", sigma=0.5, ratio=2.0)
Y_ONE = InitialLaw("point_mass", value=1.0)
Y_UNIFORM = InitialLaw("uniform", low=0.0, high=1.0)


# -- canonical forms ---------------------------------------------------------


def test_canonicalize_examples():
    assert canonicalize(((1, 5), (1, 5))) == ((1, 2), (1, 2))
    assert canonicalize(((1, 3, 3),)) == ((1, 2, 2),)
    assert canonicalize(((1, 7, 1), (1, 4, 7))) == ((1, 2, 1), (1, 3, 2))


def test_canonicalize_idempotent_on_random_sentences():
    rng = np.random.default_rng(20240401)
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        l = int(rng.integers(1, 4))
        sent = tuple(
            tuple([1] + [int(a) for a in rng.integers(1, 7, size=l)]) for _ in range(n)
        )
        once = canonicalize(sent)
        assert canonicalize(once) == once
        assert weight(once) == weight(sent)


def test_canonicalize_rejects_bad_sentences():
    with pytest.raises(DomainError):
        canonicalize(((2, 1),))
    with pytest.raises(DomainError):
        canonicalize(((1,),))
    with pytest.raises(DomainError):
        canonicalize(((1, 2), (1, 2, 3)))
    with pytest.raises(DomainError):
        canonicalize(())


# -- enumeration -------------------------------------------------------------


def test_enumerate_w_examples():
    assert enumerate_w(1, 2, 2) == [((1, 2), (1, 2))]
    assert enumerate_w(1, 2, 1) == [((1, 1), (1, 1))]
    assert enumerate_w(2, 3, 4) == []


def test_enumerated_classes_reconstruct():
    # every member has the advertised weight and all multiplicities >= 2
    for l, n in [(1, 4), (2, 2), (2, 3), (3, 2)]:
        for t in range(1, n * l + 2):
            for sent in enumerate_w(l, n, t):
                assert weight(sent) == t
                assert canonicalize(sent) == sent
                mults = edge_multiplicities(sent)
                assert all(m >= 2 for m in mults.values())
                assert sum(mults.values()) == n * l
                assert 1 in support(sent)


def test_enumeration_budget():
    with pytest.raises(CapacityError):
        enumerate_w(7, 2, 3)  # n*l = 14 over the default budget
    with pytest.raises(DomainError):
        enumerate_w(1, 2, 0)


def test_count_equivalents():
    assert count_equivalents(1, 10) == 1
    assert count_equivalents(3, 5) == 4 * 3
    assert count_equivalents(2, 4) == 3
    assert count_equivalents(5, 4) == 0  # more letters than the alphabet holds
    with pytest.raises(DomainError):
        count_equivalents(0, 4)


# -- exact moments, direct route ---------------------------------------------


def test_exact_moment_order_two_is_variance():
    for law in (RAD, UNI, ASYM):
        for N in (2, 4, 7):
            assert exact_moment(1, 2, N, law, y_law=Y_ONE) == pytest.approx(
                law.sigma**2, rel=1e-13
            )


def test_exact_moment_fourth_order_closed_form():
    # rademacher: sigma^4 (3 - 2/N)
    for N in (2, 4, 8):
        expected = RAD.sigma**4 * (3.0 - 2.0 / N)
        assert exact_moment(1, 4, N, RAD, y_law=Y_ONE) == pytest.approx(expected, rel=1e-13)
    assert exact_moment(1, 4, 2, EntryLaw("rademacher", sigma=1.0), y_law=Y_ONE) == pytest.approx(
        2.0, rel=1e-13
    )


def test_exact_moment_odd_symmetric_is_exact_zero():
    assert exact_moment(1, 3, 5, RAD, y_law=Y_ONE) == 0.0
    assert exact_moment(1, 3, 4, UNI, y_law=Y_ONE) == 0.0
    assert exact_moment(3, 1, 4, RAD, y_law=Y_ONE) == 0.0


def test_exact_moment_even_length_odd_order_is_not_zero():
    # with Y = 1 the (l=2, n=1) moment equals sigma^2 / N exactly: the only
    # surviving tuple is the double self-loop at letter 1
    for N in (2, 4, 8):
        assert exact_moment(2, 1, N, RAD, y_law=Y_ONE) == pytest.approx(
            RAD.sigma**2 / N, rel=1e-13
        )


def test_exact_moment_scales_y_second_moment():
    assert exact_moment(1, 2, 6, RAD, y_law=Y_UNIFORM) == pytest.approx(
        RAD.sigma**2 * Y_UNIFORM.moment(2), rel=1e-13
    )


def test_exact_moment_with_fixed_y_vector():
    # for l = 1, n = 2 the value is sigma^2 * mean(Y_j^2), exactly
    rng = np.random.default_rng(8)
    y = rng.uniform(-1.0, 1.0, size=5)
    got = exact_moment(1, 2, 5, RAD, y_values=y)
    assert got == pytest.approx(RAD.sigma**2 * np.mean(y**2), rel=1e-13)
    ones = exact_moment(1, 4, 5, RAD, y_values=np.ones(5))
    assert ones == pytest.approx(exact_moment(1, 4, 5, RAD, y_law=Y_ONE), rel=1e-14)


def test_direct_sum_matches_independent_brute_force():
    for law in (RAD, ASYM):
        for (l, n, N) in [(1, 2, 3), (2, 2, 3), (1, 3, 4), (2, 1, 5)]:
            ours = exact_moment(l, n, N, law, y_law=Y_UNIFORM)
            ref = brute_force_normalized_moment(l, n, N, law.moment, Y_UNIFORM.moment)
            assert ours == pytest.approx(ref, rel=1e-12, abs=1e-14)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_compiled_kernel_matches_python_kernel():
    for (l, n, N) in [(1, 4, 4), (2, 2, 4), (3, 1, 6)]:
        fast = exact_moment(l, n, N, ASYM, y_law=Y_UNIFORM, compiled=True)
        slow = exact_moment(l, n, N, ASYM, y_law=Y_UNIFORM, compiled=False)
        assert fast == pytest.approx(slow, rel=1e-14, abs=1e-16)


def test_direct_budget():
    with pytest.raises(CapacityError):
        exact_moment(5, 2, 16, RAD, y_law=Y_ONE)  # 16^10 tuples
    with pytest.raises(DomainError):
        exact_moment(1, 2, 4, RAD)  # no Y at all
    with pytest.raises(DomainError):
        exact_moment(1, 2, 4, RAD, y_law=Y_ONE, y_values=np.ones(4))


# -- class route and agreement ------------------------------------------------


def test_class_route_equals_direct_route():
    for law in (RAD, UNI, ASYM):
        for y in (Y_ONE, Y_UNIFORM):
            for (l, n) in [(1, 2), (1, 3), (2, 2), (1, 4), (2, 3), (3, 2)]:
                for N in (4, 6):
                    direct = exact_moment(l, n, N, law, y_law=y)
                    classes = exact_moment_via_classes(l, n, N, law, y)
                    assert abs(direct - classes) <= 1e-12 * max(1.0, abs(direct)), (
                        law.kind,
                        y.kind,
                        l,
                        n,
                        N,
                    )


def test_class_member_count_is_count_equivalents():
    rows = class_table(2, 2, 6, RAD, Y_ONE)
    for t, _, sent, members, _ in rows:
        assert weight(sent) == t
        assert members == count_equivalents(t, 6)


# -- limit moments -------------------------------------------------------------


def test_limit_moment_values():
    assert limit_moment(1, 2, 0.5, 2.0) == 0.5**2 * 2.0
    assert limit_moment(2, 4, 1.0, 1.0) == 3.0
    assert limit_moment(3, 3, 0.7, 1.3) == 0.0
    assert limit_moment(2, 6, 1.0, 1.0) == 15.0


def test_convergence_to_limit_moment():
    # |exact(N)/limit - 1| <= 3/N; (1,2) and (2,2) exact for rademacher, Y = 1
    for (l, n) in [(1, 2), (2, 2), (3, 2), (1, 4)]:
        lim = limit_moment(l, n, RAD.sigma, 1.0)
        for N in (4, 8):
            val = exact_moment(l, n, N, RAD, y_law=Y_ONE)
            assert abs(val / lim - 1.0) <= 3.0 / N
    for N in (4, 8, 16):
        assert exact_moment(1, 2, N, RAD, y_law=Y_ONE) == pytest.approx(
            limit_moment(1, 2, RAD.sigma, 1.0), rel=1e-13
        )
        assert exact_moment_via_classes(2, 2, N, RAD, Y_ONE) == pytest.approx(
            limit_moment(2, 2, RAD.sigma, 1.0), rel=1e-13
        )


def test_moment_gap_decreases_monotonically_in_size():
    # |exact(N) - limit| is nonincreasing over N in {4, 8, 16} (N <= 8 for
    # n*l = 8); exact pairs stay at gap 0 throughout
    cases = [(1, 2), (2, 2), (3, 2), (1, 4), (2, 4)]
    for l, n in cases:
        sizes = (4, 8) if n * l == 8 else (4, 8, 16)
        limit = limit_moment(l, n, RAD.sigma, 1.0)
        gaps = [
            abs(exact_moment_via_classes(l, n, size, RAD, Y_ONE) - limit) for size in sizes
        ]
        assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:])), (l, n, gaps)


def test_asymmetric_odd_moments_decay_with_fitted_constant():
    # strongly skewed law: |value| <= C N^(-1/2) with one fitted constant
    values = {N: exact_moment_via_classes(1, 3, N, ASYM, Y_ONE) for N in (4, 8, 16, 32)}
    c_fit = max(abs(v) * math.sqrt(N) for N, v in values.items())
    assert all(abs(v) <= c_fit / math.sqrt(N) + 1e-15 for N, v in values.items())
    assert abs(values[32]) < abs(values[4])


# -- weight scan ---------------------------------------------------------------


def test_max_weight_scan_within_bound_for_even_length():
    report = max_weight_report(2, 3)
    assert isinstance(report, WeightScanReport)
    assert report.bound == 3
    assert report.max_weight == 3
    assert report.within_bound
    assert report.witnesses == ()


def test_max_weight_scan_single_word():
    report = max_weight_report(2, 1)
    assert report.bound == 1
    assert report.max_weight == 1  # only the double self-loop word survives
    assert report.class_counts == {1: 1}


def test_max_weight_scan_witness_for_short_words():
    # length-2 words at n=3 exceed the bound: ((1,2),(1,2),(1,2)) has weight 2
    report = max_weight_report(1, 3)
    assert report.bound == 1
    assert report.max_weight == 2
    assert ((1, 2), (1, 2), (1, 2)) in report.witnesses
    assert not report.within_bound


def test_max_weight_scan_rejects_even_n():
    with pytest.raises(DomainError):
        max_weight_report(2, 4)
