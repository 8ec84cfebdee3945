import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nclp.exceptions import BadExponents, InvalidParameter, NotPSD
from nclp.inequalities import (
    check_araki_kosaki,
    check_commutative_bound,
    check_convexity_bound,
    check_derivative,
    check_diff_inequality,
    check_integral_identity,
    check_positive_split,
    positive_split,
)
from tests.helpers import random_matrix, random_psd

ONE = np.array([[1.0]])


class TestDiffInequality:
    def test_scalar(self):
        report = check_diff_inequality(ONE, ONE, 3)
        assert report["lhs"] == pytest.approx(7.0)
        assert report["rhs"] == pytest.approx(12.0)
        assert report["verdict"] == "pass"

    def test_zero_base(self):
        report = check_diff_inequality(np.zeros((1, 1)), ONE, 4)
        assert report["lhs"] == pytest.approx(1.0)
        assert report["rhs"] == pytest.approx(32.0)

    def test_boundary_exponent_is_noted(self):
        report = check_diff_inequality(ONE, ONE, 2)
        assert "boundary exponent p=2" in report["notes"]

    def test_exponent_below_two(self):
        with pytest.raises(BadExponents):
            check_diff_inequality(ONE, ONE, 1.5)

    def test_requires_psd(self):
        with pytest.raises(NotPSD):
            check_diff_inequality(np.diag([1.0, -1.0]), np.eye(2), 3)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), p=st.sampled_from([2, 2.5, 3, 4, 7]))
    def test_random_pairs(self, seed, p):
        report = check_diff_inequality(random_psd(seed, 4), random_psd(seed + 1, 4), p)
        assert report["verdict"] == "pass"


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), p=st.sampled_from([1.5, 2, 3, 4.5]))
def test_integral_identity(seed, p):
    report = check_integral_identity(random_psd(seed, 3, shift=0.1), random_psd(seed + 1, 3), p)
    assert report["verdict"] == "pass"
    assert report["check_name"] == "diff-integral"


class TestConvexityBound:
    def test_scalar(self):
        report = check_convexity_bound(ONE, ONE, 3)
        assert report["rhs"] == pytest.approx(9.0)
        assert report["verdict"] == "pass"

    def test_exponent_above_three(self):
        with pytest.raises(BadExponents):
            check_convexity_bound(ONE, ONE, 4)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), p=st.sampled_from([2, 2.5, 3]))
    def test_random_pairs(self, seed, p):
        assert check_convexity_bound(random_psd(seed, 4), random_psd(seed + 1, 4), p)["verdict"] == "pass"


class TestCommutativeBound:
    def test_scalar_is_tight(self):
        report = check_commutative_bound(ONE, ONE, 3)
        assert report["lhs"] == pytest.approx(7.0)
        assert report["rhs"] == pytest.approx(7.0)
        assert report["verdict"] == "pass"

    def test_diagonal_pair(self):
        report = check_commutative_bound(np.diag([1.0, 0.5, 0.0]), np.diag([0.2, 2.0, 1.0]), 5)
        assert report["verdict"] == "pass"

    def test_noncommuting(self):
        with pytest.raises(InvalidParameter):
            check_commutative_bound(random_psd(1, 3), random_psd(2, 3), 3)


class TestArakiKosaki:
    def test_commuting_scalars(self):
        report = check_araki_kosaki(np.array([[4.0]]), np.array([[9.0]]), 1, 0.5)
        assert report["lhs"] == pytest.approx(6.0)
        assert report["rhs"] == pytest.approx(6.0)
        assert report["verdict"] == "pass"

    def test_orthogonal_supports(self):
        report = check_araki_kosaki(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), 2, 0.3)
        assert report["rhs"] == 0.0
        assert report["verdict"] == "pass"

    def test_eta_range(self):
        with pytest.raises(InvalidParameter):
            check_araki_kosaki(ONE, ONE, 1, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1),
           eta=st.sampled_from([0.1, 0.3, 0.5, 0.9]),
           q=st.sampled_from([1, 2, 4]))
    def test_random_pairs(self, seed, eta, q):
        assert check_araki_kosaki(random_psd(seed, 4), random_psd(seed + 1, 4), q, eta)["verdict"] == "pass"


class TestPositiveSplit:
    def test_real_diagonal(self):
        parts = positive_split(np.diag([1.0, -2.0]))
        np.testing.assert_allclose(parts.x0, np.diag([1.0, 0.0]))
        np.testing.assert_allclose(parts.x2, np.diag([0.0, 2.0]))
        np.testing.assert_allclose(parts.x1, 0.0)
        np.testing.assert_allclose(parts.x3, 0.0)

    def test_psd_input(self):
        a = random_psd(3, 4)
        parts = positive_split(a)
        np.testing.assert_allclose(parts.x0, a, atol=1e-12)
        np.testing.assert_allclose(parts.x2, 0.0, atol=1e-12)

    def test_resum(self):
        x = random_matrix(4, 5)
        np.testing.assert_allclose(positive_split(x).resum(), x, atol=1e-12)

    def test_ptd_norms_do_not_grow(self, density):
        report = check_positive_split(random_matrix(5, 6), density, 3, 2.0)
        assert report["verdict"] == "pass"


class TestDerivative:
    def test_scalar(self):
        report = check_derivative(ONE, ONE, 3)
        assert report["lhs"] == pytest.approx(1e-8, rel=1e-3)
        assert report["verdict"] == "pass"

    def test_interior_point(self):
        report = check_derivative(random_psd(6, 4, shift=0.5), random_psd(7, 4), 2.5, s=0.5)
        assert report["verdict"] == "pass"

    def test_negative_s(self):
        with pytest.raises(InvalidParameter):
            check_derivative(ONE, ONE, 3, s=-1.0)

    def test_p_one(self):
        with pytest.raises(BadExponents):
            check_derivative(ONE, ONE, 1)
