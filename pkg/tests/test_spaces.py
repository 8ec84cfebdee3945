from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nclp.density import BlockSpectrum, make_density
from nclp.exceptions import BadExponents, InvalidParameter
from nclp.matcore import schatten_norm
from nclp.randomgen import random_density, trial_rng
from nclp.spaces import (
    ExponentSpec,
    check_discretization,
    delta_norm,
    delta_seminorm,
    ptd_norm,
    symmetric_modulus,
    triangular_compress,
    triangular_weighted_norm,
    weighted_norm,
)
from tests.helpers import random_matrix


class TestExponentSpec:
    def test_alpha_and_s(self):
        spec = ExponentSpec.of(4, 2)
        assert spec.exact_alpha == Fraction(1, 4)
        assert spec.s.exact == 4

    def test_infinite_p(self):
        spec = ExponentSpec.of("inf", 2)
        assert spec.alpha == 0.5

    def test_interpolate(self):
        spec = ExponentSpec.of(4, 2)
        assert spec.interpolate(0.5).exact == Fraction(8, 3)
        assert spec.interpolate(0).exact == 4
        with pytest.raises(InvalidParameter):
            spec.interpolate(1.5)

    @pytest.mark.parametrize("p,q", [(2, 4), (3, 3), (2, "inf")])
    def test_bad_order(self, p, q):
        with pytest.raises(BadExponents):
            ExponentSpec.of(p, q)


class TestWeightedNorms:
    def test_tracial_density(self):
        n = 4
        d = make_density(np.eye(n))
        spec = ExponentSpec.of(4, 2)
        x = random_matrix(1, n)
        expected = n ** (-spec.alpha) * schatten_norm(x, 2)
        assert weighted_norm(x, d, spec, "left") == pytest.approx(expected)
        assert delta_norm(x, d, spec) == pytest.approx(expected)

    def test_side(self, density):
        with pytest.raises(InvalidParameter):
            weighted_norm(np.eye(6), density, ExponentSpec.of(4, 2), "middle")

    def test_adjoint_swaps_sides(self, density):
        spec = ExponentSpec.of(3, 1)
        x = random_matrix(2, 6)
        assert weighted_norm(x, density, spec, "left") == pytest.approx(
            weighted_norm(x.conj().T, density, spec, "right"))

    def test_seminorm_ignores_outer_corner(self, singular_density):
        k = singular_density.kernel_basis
        x = k @ np.array([[1.0, 2.0], [3.0, 4.0]]) @ k.conj().T
        result = delta_seminorm(x, singular_density, ExponentSpec.of(4, 2))
        assert result.value == pytest.approx(0.0, abs=1e-12)
        assert result.annihilated == pytest.approx(np.sqrt(30.0))
        assert not result.faithful


class TestPtdNorm:
    def test_scalar(self):
        d = make_density(np.eye(1))
        assert ptd_norm(np.array([[2.0]]), d, 2, 4.0) == pytest.approx(8.0)
        assert ptd_norm(np.array([[2.0]]), d, 2, 0.01) == pytest.approx(0.2)

    def test_requires_p_at_least_two(self, density):
        with pytest.raises(BadExponents):
            ptd_norm(np.eye(6), density, 1.5, 1.0)

    def test_requires_positive_t(self, density):
        with pytest.raises(InvalidParameter):
            ptd_norm(np.eye(6), density, 3, 0.0)


def test_symmetric_modulus_of_normal_matrix():
    x = np.diag([3.0, -4j])
    np.testing.assert_allclose(symmetric_modulus(x), np.diag([3.0, 4.0]), atol=1e-12)


def test_symmetric_modulus_squares():
    x = random_matrix(3, 4)
    m = symmetric_modulus(x)
    np.testing.assert_allclose(m @ m, (x.conj().T @ x + x @ x.conj().T) / 2, atol=1e-10)


class TestTriangularCompress:
    def test_parts_sum_to_input(self, density):
        x = random_matrix(4, 6)
        upper = triangular_compress(x, density.blocks, "upper")
        lower = triangular_compress(x, density.blocks, "lower")
        np.testing.assert_allclose(upper + lower, x, atol=1e-12)

    def test_coordinate_blocks(self):
        blocks = BlockSpectrum.coordinate([1, 1, 1])
        x = np.arange(9.0).reshape(3, 3)
        np.testing.assert_allclose(triangular_compress(x, blocks, "upper"), np.triu(x))
        assert triangular_weighted_norm(x, blocks, 2, 0.0, "lower") == pytest.approx(
            np.linalg.norm(np.tril(x, -1)))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), eps=st.sampled_from([0.05, 0.3, 1.0]))
def test_discretization_check_passes(seed, eps):
    d = random_density(trial_rng(seed), 4, condition=100.0)
    x = random_matrix(seed, 4)
    report = check_discretization(x, d, ExponentSpec.of(4, 2), eps, seed=seed)
    assert report["verdict"] == "pass"
    assert report["lhs"] >= 1.0
