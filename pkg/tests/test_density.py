import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nclp.density import (
    BlockSpectrum,
    corners,
    discretize,
    make_density,
    off_support_norm,
    power_weight,
    sandwich_constant,
    spectral_blocks,
)
from nclp.exceptions import InvalidEpsilon, InvalidParameter, NotPSD, ZeroTrace
from nclp.randomgen import random_density, trial_rng
from tests.helpers import random_matrix


class TestMakeDensity:
    def test_two_level(self, two_level):
        np.testing.assert_allclose(two_level.eigenvalues, [0.25, 0.75])
        np.testing.assert_allclose(two_level.blocks.values, [0.25, 0.75])
        assert two_level.is_faithful
        assert two_level.condition == pytest.approx(3.0)

    def test_zero_matrix(self):
        with pytest.raises(ZeroTrace):
            make_density(np.zeros((3, 3)))

    def test_indefinite(self):
        with pytest.raises(NotPSD):
            make_density(np.diag([1.0, -1.0]))

    def test_repeated_eigenvalues_share_a_block(self):
        d = make_density(np.diag([1.0, 1.0, 2.0]))
        np.testing.assert_allclose(d.blocks.values, [0.25, 0.5])
        assert list(d.blocks.ranks) == [2, 1]

    def test_rank_deficient(self, singular_density):
        assert singular_density.rank == 3
        assert not singular_density.is_faithful
        assert singular_density.kernel_basis.shape == (5, 2)
        assert np.trace(singular_density.matrix).real == pytest.approx(1.0)

    def test_state(self, two_level):
        assert two_level.state(np.diag([1.0, 0.0])) == pytest.approx(0.25)

    def test_near_degenerate_chain_is_split(self):
        d = make_density(np.diag([1.0, 1.0008, 1.0016, 1.0024]), cluster_tol=1e-3)
        assert list(d.blocks.ranks) == [2, 2]
        for k in range(d.blocks.count):
            members = d.eigenvalues[d.support_mask][d.blocks.labels == k]
            assert (members.max() - members.min()) / members.max() <= 1e-3
        assert (d.blocks.values * d.blocks.ranks).sum() == pytest.approx(1.0, abs=1e-12)

    def test_cluster_tol_range(self, density):
        with pytest.raises(InvalidParameter):
            spectral_blocks(density, 1.5)

    def test_power_weight(self, two_level, singular_density):
        np.testing.assert_allclose(power_weight(two_level, 1.0), two_level.matrix, atol=1e-15)
        support = power_weight(singular_density, 0.0)
        np.testing.assert_allclose(support @ support, support, atol=1e-12)
        assert np.trace(support).real == pytest.approx(3.0)


class TestBlockSpectrum:
    def test_from_diagonal(self):
        blocks = BlockSpectrum.from_diagonal([2.0, 0.0, 1.0, 2.0])
        np.testing.assert_allclose(blocks.values, [1.0, 2.0])
        assert list(blocks.ranks) == [1, 2]
        assert blocks.rank == 3
        assert blocks.dim == 4
        np.testing.assert_allclose(blocks.weight(1.0), np.diag([2.0, 0.0, 1.0, 2.0]))

    def test_coordinate(self):
        blocks = BlockSpectrum.coordinate([1, 2])
        np.testing.assert_allclose(blocks.projection(1), np.diag([0.0, 1.0, 1.0]))
        assert blocks.export() == {"values": [1.0, 2.0], "ranks": [1, 2]}

    def test_values_must_increase(self):
        with pytest.raises(InvalidParameter):
            BlockSpectrum(np.array([2.0, 1.0]), np.eye(2), np.array([0, 1]))

    def test_empty_block_rejected(self):
        with pytest.raises(InvalidParameter):
            BlockSpectrum(np.array([1.0, 2.0]), np.eye(2), np.array([0, 0]))

    def test_projections_resolve_support(self, density):
        total = sum(density.blocks.projections)
        np.testing.assert_allclose(total, np.eye(density.dim), atol=1e-12)

    def test_matrix_unit(self, density):
        blocks = density.blocks
        u = blocks.matrix_unit(0, blocks.count - 1)
        assert np.linalg.matrix_rank(u) == 1
        np.testing.assert_allclose(blocks.projection(0) @ u @ blocks.projection(blocks.count - 1), u, atol=1e-12)

    def test_triangle_mask_part(self):
        with pytest.raises(InvalidParameter):
            BlockSpectrum.coordinate([1, 1]).triangle_mask("diagonal")


class TestDiscretize:
    def test_rejects_nonpositive_eps(self, density):
        with pytest.raises(InvalidEpsilon):
            discretize(density, 0.0)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), eps=st.sampled_from([0.01, 0.1, 0.5, 1.0]))
    def test_sandwich(self, seed, eps):
        d = random_density(trial_rng(seed), 5, condition=1e3)
        d_eps = discretize(d, eps)
        assert np.trace(d_eps.matrix).real == pytest.approx(1.0)
        assert sandwich_constant(d, d_eps) <= (1 + eps) * (1 + 1e-9)
        np.testing.assert_allclose(d.matrix @ d_eps.matrix, d_eps.matrix @ d.matrix, atol=1e-12)

    def test_values_lie_on_a_geometric_grid(self, density):
        d_eps = discretize(density, 0.25)
        ratios = np.log(d_eps.blocks.values[-1] / d_eps.blocks.values) / np.log(1.25)
        np.testing.assert_allclose(ratios, np.round(ratios), atol=1e-8)

    def test_keeps_kernel(self, singular_density):
        assert discretize(singular_density, 0.1).rank == 3

    def test_self_sandwich(self, density):
        assert sandwich_constant(density, density) == pytest.approx(1.0)


class TestCorners:
    def test_sum_back(self, singular_density):
        x = random_matrix(5, 5)
        np.testing.assert_allclose(sum(corners(x, singular_density)), x, atol=1e-12)

    def test_off_support_norm(self, singular_density, density):
        x = random_matrix(6, 5)
        assert off_support_norm(x, singular_density) == pytest.approx(
            np.linalg.norm(corners(x, singular_density).outer))
        assert off_support_norm(random_matrix(6, 6), density) == 0.0
