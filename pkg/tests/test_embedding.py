import numpy as np
import pytest

from nclp.density import corners, make_density
from nclp.embedding import (
    SubspaceBasis,
    balance_objective,
    balance_parameter,
    build_embedding,
    embed_u,
    heuristic_density,
    reconstruct,
    subspace_distortion,
)
from nclp.exceptions import BadExponents, CornerNotAnnihilated, DegenerateBasis, InvalidParameter
from tests.helpers import random_matrix


class TestEmbedU:
    def test_one_dimensional(self):
        d = make_density(np.eye(1))
        np.testing.assert_allclose(embed_u(np.array([[3.0]]), d, 2, 4), [[1.5]])

    def test_commuting_input(self, two_level):
        alpha = 0.25
        x = np.diag([2.0, 5.0])
        expected = np.diag([2.0 / (2 * 0.25 ** alpha), 5.0 / (2 * 0.75 ** alpha)])
        np.testing.assert_allclose(embed_u(x, two_level, 2, 4), expected, atol=1e-14)

    def test_off_diagonal_block(self, two_level):
        x = np.array([[0.0, 1.0], [0.0, 0.0]])
        expected = 1.0 / (0.25 ** 0.5 + 0.75 ** 0.5)
        assert embed_u(x, two_level, 2, "inf")[0, 1].real == pytest.approx(expected)

    @pytest.mark.parametrize("q,p", [(1, 2), (2, 4), (1.5, "inf"), (3, 7)])
    def test_round_trip(self, density, q, p):
        x = random_matrix(7, 6)
        np.testing.assert_allclose(reconstruct(embed_u(x, density, q, p), density, q, p), x, atol=1e-10)

    def test_round_trip_without_outer_corner(self, singular_density):
        parts = corners(random_matrix(8, 5), singular_density)
        x = parts.inner + parts.right + parts.left
        u = embed_u(x, singular_density, 2, 4)
        np.testing.assert_allclose(reconstruct(u, singular_density, 2, 4), x, atol=1e-10)

    def test_outer_corner_rejected(self, singular_density):
        with pytest.raises(CornerNotAnnihilated):
            embed_u(random_matrix(9, 5), singular_density, 2, 4)

    def test_exponents(self, density):
        with pytest.raises(BadExponents):
            embed_u(np.eye(6), density, 4, 2)


class TestSubspaceBasis:
    def test_degenerate(self):
        with pytest.raises(DegenerateBasis):
            SubspaceBasis((np.eye(2), 2 * np.eye(2)))

    def test_empty(self):
        with pytest.raises(DegenerateBasis):
            SubspaceBasis(())

    def test_combine(self):
        basis = SubspaceBasis((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
        np.testing.assert_allclose(basis.combine([2.0, 3.0]), np.diag([2.0, 3.0]))
        np.testing.assert_allclose(basis.gram(), np.eye(2))


class TestBuildEmbedding:
    def test_certified(self, density):
        basis = SubspaceBasis((random_matrix(1, 6), random_matrix(2, 6)))
        result = build_embedding(basis, density, 2, 4)
        assert result.support_rank == 6
        assert result.reconstruction_residual < 1e-8
        assert result.alpha == pytest.approx(0.25)
        x = basis.combine([1.0, -1j])
        np.testing.assert_allclose(result.inverse(result(x)), x, atol=1e-10)

    def test_one_dimensional_subspace_has_no_distortion(self, density):
        basis = SubspaceBasis((random_matrix(3, 6),))
        lower, upper = subspace_distortion(basis, density, 2, 4, trials=5, seed=1)
        assert lower == pytest.approx(upper, rel=1e-10)

    def test_distortion_trials(self, density):
        basis = SubspaceBasis((random_matrix(3, 6),))
        with pytest.raises(InvalidParameter):
            subspace_distortion(basis, density, 2, 4, trials=0, seed=1)

    def test_heuristic_density(self):
        basis = SubspaceBasis((random_matrix(4, 3), random_matrix(5, 3)))
        d = heuristic_density(basis)
        assert np.trace(d.matrix).real == pytest.approx(1.0)
        assert d.is_faithful


class TestBalance:
    def test_equal_weights(self):
        t_star, value = balance_parameter(0.7, 0.7, 4, 2)
        assert t_star == pytest.approx(1.0)
        assert value == pytest.approx(0.7)

    def test_closed_form(self):
        t_star, value = balance_parameter(2.0, 1.0, 4, 2)
        assert t_star == pytest.approx(2 ** (4 / 3))
        assert value == pytest.approx(2 ** (2 / 3))
        assert balance_objective(t_star, 2.0, 1.0, 4, 2) == pytest.approx(value)

    def test_minimizes_over_grid(self):
        t_star, value = balance_parameter(0.3, 5.0, 6, 3)
        grid = np.logspace(-6, 6, 1000)
        assert min(balance_objective(t, 0.3, 5.0, 6, 3) for t in grid) >= value * (1 - 1e-12)

    @pytest.mark.parametrize("p,q", [(4, 1.5), ("inf", 2), (2, 3)])
    def test_exponents(self, p, q):
        with pytest.raises(BadExponents):
            balance_parameter(1.0, 1.0, p, q)

    def test_weights(self):
        with pytest.raises(InvalidParameter):
            balance_parameter(0.0, 1.0, 4, 2)
