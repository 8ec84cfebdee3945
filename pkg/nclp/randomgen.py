"""Seeded random instances.

Every stream is a Philox counter-based generator keyed by a SeedSequence
built from the master seed and the indices that identify the consumer
(trial number, grid point, ...). The same key gives the same numbers on
every platform, regardless of how trials are scheduled.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from scipy import linalg

from .density import BlockSpectrum, Density, make_density
from .exceptions import InvalidParameter
from .matcore import SquareMatrix, adjoint

Kind = Literal["hermitian", "psd", "density", "upper_triangular"]
KINDS: tuple[str, ...] = ("hermitian", "psd", "density", "upper_triangular")

_KIND_CODES = {kind: i for i, kind in enumerate(KINDS)}


def trial_rng(seed: int, *indices: int) -> np.random.Generator:
    """Independent stream for (seed, *indices)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, indices)])))


def gaussian(rng: np.random.Generator, dim: int) -> SquareMatrix:
    """Standard complex Gaussian matrix, E|g_ij|² = 1."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def hermitian(rng: np.random.Generator, dim: int) -> SquareMatrix:
    g = gaussian(rng, dim)
    return (g + adjoint(g)) / 2


def psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> SquareMatrix:
    cols = dim if rank is None else rank
    g = (rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))) / np.sqrt(2)
    a = g @ adjoint(g) / dim
    return (a + adjoint(a)) / 2


def unitary(rng: np.random.Generator, dim: int) -> SquareMatrix:
    """Haar unitary from the QR of a Gaussian matrix with the phase fix."""
    q, r = linalg.qr(gaussian(rng, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(rng: np.random.Generator, dim: int, *, condition: float | None = None,
                   rank: int | None = None) -> Density:
    """Density with log-uniform spectrum in [1, condition] in a Haar basis.

    ``rank`` below ``dim`` leaves a kernel; without ``condition`` the density
    is a normalized Wishart sample.
    """
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidParameter(f"rank must lie in [1, {dim}], got {rank}")
    if condition is None:
        return make_density(psd(rng, dim, rank))
    spectrum = np.zeros(dim)
    spectrum[:rank] = np.exp(rng.uniform(0.0, np.log(condition), size=rank))
    if rank > 1:
        spectrum[0], spectrum[1] = 1.0, condition
    u = unitary(rng, dim)
    return make_density((u * spectrum) @ adjoint(u))


def random_partition(rng: np.random.Generator, dim: int) -> list[int]:
    """Block sizes of a random ordered partition of dim."""
    count = int(rng.integers(1, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), size=count - 1, replace=False)) if count > 1 else []
    edges = [0, *map(int, cuts), dim]
    return [b - a for a, b in zip(edges, edges[1:])]


def upper_triangular(rng: np.random.Generator, dim: int, blocks: BlockSpectrum | None = None) -> SquareMatrix:
    """Hermitian sample compressed to Σ_{i≤j} e_i x e_j."""
    if blocks is None:
        blocks = BlockSpectrum.coordinate(random_partition(rng, dim))
    h = hermitian(rng, dim)
    c = blocks.to_eigenbasis(h)
    return blocks.from_eigenbasis(np.where(blocks.triangle_mask("upper"), c, 0))


def triangular_sample(rng: np.random.Generator, blocks: BlockSpectrum, part: str = "upper") -> SquareMatrix:
    """Gaussian sample compressed to the chosen block triangle."""
    c = blocks.to_eigenbasis(gaussian(rng, blocks.dim))
    return blocks.from_eigenbasis(np.where(blocks.triangle_mask(part), c, 0))


def gen_random(kind: Kind, dim: int, seed: int) -> SquareMatrix:
    """Deterministic sample per (kind, dim, seed)."""
    if dim < 1:
        raise InvalidParameter(f"dim must be >= 1, got {dim}")
    if kind not in _KIND_CODES:
        raise InvalidParameter(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    rng = trial_rng(seed, _KIND_CODES[kind], dim)
    if kind == "hermitian":
        return hermitian(rng, dim)
    if kind == "psd":
        return psd(rng, dim)
    if kind == "density":
        return make_density(psd(rng, dim)).matrix
    return upper_triangular(rng, dim)
