import numpy as np
import pytest

from nclp.exceptions import InvalidParameter
from nclp.randomgen import (
    KINDS,
    gen_random,
    hermitian,
    psd,
    random_density,
    random_partition,
    trial_rng,
    unitary,
)


def test_streams_are_keyed_by_indices():
    first = trial_rng(5, 1).standard_normal(4)
    np.testing.assert_array_equal(first, trial_rng(5, 1).standard_normal(4))
    assert not np.array_equal(first, trial_rng(5, 2).standard_normal(4))
    assert not np.array_equal(first, trial_rng(6, 1).standard_normal(4))


def test_hermitian_is_exact():
    h = hermitian(trial_rng(0), 5)
    np.testing.assert_array_equal(h, h.conj().T)


def test_psd_spectrum():
    for seed in range(20):
        w = np.linalg.eigvalsh(psd(trial_rng(seed), 6))
        assert w.min() >= -1e-12 * w.max()


def test_unitary():
    u = unitary(trial_rng(1), 4)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


class TestRandomDensity:
    def test_condition(self):
        d = random_density(trial_rng(2), 6, condition=1e3)
        assert np.trace(d.matrix).real == pytest.approx(1.0)
        assert d.condition == pytest.approx(1e3, rel=1e-8)

    def test_rank(self):
        d = random_density(trial_rng(3), 6, condition=10.0, rank=2)
        assert d.rank == 2

    def test_wishart(self):
        assert random_density(trial_rng(4), 3).is_faithful

    def test_rank_range(self):
        with pytest.raises(InvalidParameter):
            random_density(trial_rng(5), 3, rank=4)


def test_random_partition_covers_dim():
    rng = trial_rng(6)
    for _ in range(20):
        sizes = random_partition(rng, 7)
        assert sum(sizes) == 7
        assert min(sizes) >= 1


class TestGenRandom:
    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic(self, kind):
        np.testing.assert_array_equal(gen_random(kind, 4, 11), gen_random(kind, 4, 11))

    def test_density_kind_has_unit_trace(self):
        assert np.trace(gen_random("density", 5, 0)).real == pytest.approx(1.0)

    def test_unknown_kind(self):
        with pytest.raises(InvalidParameter):
            gen_random("unitary", 3, 0)

    def test_dim(self):
        with pytest.raises(InvalidParameter):
            gen_random("psd", 0, 0)
