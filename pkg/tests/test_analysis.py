"""Closed-form DOF formulas and their regime structure."""

import numpy as np
import pytest

from xrelay import (
    dof_report,
    dof_upper_bound,
    reduced_achievable_full,
    sajic_achievable_dof,
    time_share_dof,
)


class TestUpperBound:
    def test_examples(self):
        assert dof_upper_bound(5, 8) == 16
        assert dof_upper_bound(3, 4) == 8

    @pytest.mark.parametrize("m", range(1, 9))
    def test_min_boundary(self, m):
        assert dof_upper_bound(m, 2 * m) == 4 * m

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            dof_upper_bound(0, 3)


class TestSajicDof:
    def test_examples(self):
        assert sajic_achievable_dof(5, 8) == 16
        assert sajic_achievable_dof(5, 9) == 8  # 16M - 8N
        assert sajic_achievable_dof(5, 10) == 0

    @pytest.mark.parametrize("m", range(1, 33))
    def test_regime_structure(self, m):
        boundary = (8 * m) // 5
        for n in range(1, boundary + 1):
            assert sajic_achievable_dof(m, n) == 2 * n
        degraded = [sajic_achievable_dof(m, n) for n in range(boundary + 1, 2 * m)]
        assert all(a > b for a, b in zip(degraded, degraded[1:]))
        assert sajic_achievable_dof(m, 2 * m) == 0
        if (8 * m) % 5 == 0:
            # Continuity where the boundary is integral.
            assert 2 * boundary == 16 * m - 8 * boundary


class TestReducedPredicate:
    def test_examples(self):
        assert reduced_achievable_full(3, 4) is True
        assert reduced_achievable_full(5, 8) is False

    @pytest.mark.parametrize("m", range(1, 17))
    def test_square_always_full(self, m):
        assert reduced_achievable_full(m, m)


class TestTimeShare:
    def test_examples(self):
        assert time_share_dof(5, 8) == 10
        assert time_share_dof(4, 4) == 8
        assert time_share_dof(3, 4) == 6


class TestDofReport:
    def test_5_8(self):
        r = dof_report(5, 8)
        assert (r.upper_bound, r.sajic_dof, r.reduced_dof, r.time_share_dof) == (16, 16, None, 10)
        assert r.sajic_full and not r.reduced_full

    def test_3_4(self):
        r = dof_report(3, 4)
        assert (r.upper_bound, r.sajic_dof, r.reduced_dof, r.time_share_dof) == (8, 8, 8, 6)
        assert r.sajic_full and r.reduced_full

    def test_single_antenna_corner(self):
        r = dof_report(1, 1)
        assert (r.upper_bound, r.sajic_dof, r.reduced_dof, r.time_share_dof) == (2, 2, 2, 2)
        assert r.sajic_full and r.reduced_full

    def test_bounds_never_exceeded(self):
        for m in range(1, 21):
            for n in range(1, 41):
                r = dof_report(m, n)
                assert r.sajic_dof <= r.upper_bound
                assert r.time_share_dof <= r.upper_bound
                if r.reduced_dof is not None:
                    assert r.reduced_dof <= r.upper_bound


def test_reduced_full_implies_sajic_full():
    for m in range(1, 65):
        for n in range(1, 2 * m + 1):
            if reduced_achievable_full(m, n):
                assert sajic_achievable_dof(m, n) == dof_upper_bound(m, n)


def test_floor_equivalences_vectorized():
    m = np.arange(1, 10_001, dtype=np.int64)
    for num, den in ((8, 5), (4, 3)):
        boundary = (num * m) // den
        # N <= floor(num*M/den) iff den*N <= num*M, checked at the boundary
        # and one past it, which covers every integer N.
        assert np.all(den * boundary <= num * m)
        assert np.all(den * (boundary + 1) > num * m)
