"""Densities of (possibly non-faithful) states and their spectral blocks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import linalg

from config import settings

from .exceptions import InvalidEpsilon, InvalidParameter, ZeroTrace
from .matcore import (
    SquareMatrix,
    adjoint,
    as_square_matrix,
    check_psd_spectrum,
    hermitian_eigh,
    kernel_mask,
    require_same_dim,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    """Ordered values d_1 < … < d_m with orthogonal projections e_k.

    Stored as an orthonormal basis of the support whose columns are labelled
    by block index, so that e_k = B_k B_k*. Schur multipliers and triangular
    compressions act entrywise in that basis.
    """

    values: np.ndarray
    basis: SquareMatrix
    labels: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        basis = np.asarray(self.basis, dtype=np.complex128)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "labels", labels)

        if values.ndim != 1 or values.size == 0:
            raise InvalidParameter("block spectrum needs at least one value")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise InvalidParameter("block values must be finite and positive")
        if np.any(np.diff(values) <= 0):
            raise InvalidParameter("block values must be strictly increasing")
        if basis.ndim != 2 or basis.shape[1] != labels.size:
            raise InvalidParameter("basis columns and labels disagree")
        gram = adjoint(basis) @ basis
        if np.abs(gram - np.eye(labels.size)).max() > 1e-10:
            raise InvalidParameter("block basis is not orthonormal")
        if labels.size and (labels.min() < 0 or labels.max() >= values.size):
            raise InvalidParameter("block label out of range")
        if np.any(np.bincount(labels, minlength=values.size) == 0):
            raise InvalidParameter("every block needs a nonzero projection")

    @classmethod
    def from_diagonal(cls, diagonal: Sequence[float]) -> "BlockSpectrum":
        """Coordinate blocks; equal entries share a block, zeros fall off the support."""
        diagonal = np.asarray(diagonal, dtype=float)
        n = diagonal.size
        values = np.unique(diagonal[diagonal > 0])
        order = [i for v in values for i in np.flatnonzero(diagonal == v)]
        basis = np.eye(n, dtype=np.complex128)[:, order]
        labels = np.searchsorted(values, diagonal[order])
        return cls(values, basis, labels)

    @classmethod
    def coordinate(cls, sizes: Sequence[int], values: Sequence[float] | None = None) -> "BlockSpectrum":
        """Contiguous coordinate blocks of the given sizes."""
        sizes = [int(s) for s in sizes]
        if values is None:
            values = np.arange(1, len(sizes) + 1, dtype=float)
        labels = np.repeat(np.arange(len(sizes)), sizes)
        return cls(np.asarray(values, dtype=float), np.eye(sum(sizes), dtype=np.complex128), labels)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def rank(self) -> int:
        return self.labels.size

    @property
    def ranks(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)

    def projection(self, k: int) -> SquareMatrix:
        cols = self.basis[:, self.labels == k]
        return cols @ adjoint(cols)

    @property
    def projections(self) -> list[SquareMatrix]:
        return [self.projection(k) for k in range(self.count)]

    @property
    def support(self) -> SquareMatrix:
        return self.basis @ adjoint(self.basis)

    def column_values(self) -> np.ndarray:
        return self.values[self.labels]

    def weight(self, alpha: float) -> SquareMatrix:
        """Σ_k d_k^α e_k (a pseudo-power on the support)."""
        return (self.basis * self.column_values() ** alpha) @ adjoint(self.basis)

    def condition(self, alpha: float = 1.0) -> float:
        w = self.values ** alpha
        return float(w.max() / w.min())

    def matrix_unit(self, k: int, j: int) -> SquareMatrix:
        """Rank-one b_k b_j* with b_k, b_j the first basis vectors of blocks k and j."""
        a = int(np.flatnonzero(self.labels == k)[0])
        b = int(np.flatnonzero(self.labels == j)[0])
        return np.outer(self.basis[:, a], self.basis[:, b].conj())

    def to_eigenbasis(self, x: SquareMatrix) -> SquareMatrix:
        return adjoint(self.basis) @ x @ self.basis

    def from_eigenbasis(self, c: SquareMatrix) -> SquareMatrix:
        return self.basis @ c @ adjoint(self.basis)

    def expand(self, table: np.ndarray) -> np.ndarray:
        """Lift an m×m block table to the r×r entry grid of the eigenbasis."""
        return np.asarray(table)[np.ix_(self.labels, self.labels)]

    def triangle_mask(self, part: str = "upper") -> np.ndarray:
        rows, cols = self.labels[:, None], self.labels[None, :]
        if part == "upper":
            return rows <= cols
        if part == "lower":
            return rows > cols
        raise InvalidParameter(f"part must be 'upper' or 'lower', got {part!r}")

    def export(self) -> dict:
        return {"values": [float(v) for v in self.values], "ranks": [int(r) for r in self.ranks]}


@dataclass(frozen=True, eq=False)
class Density:
    """Trace-one PSD matrix with its support and spectral blocks."""

    matrix: SquareMatrix
    eigenvalues: np.ndarray
    eigenvectors: SquareMatrix
    blocks: BlockSpectrum
    cluster_tol: float = field(default=settings.CLUSTER_TOL)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def support_mask(self) -> np.ndarray:
        return self.eigenvalues > 0

    @property
    def rank(self) -> int:
        return int(self.support_mask.sum())

    @property
    def is_faithful(self) -> bool:
        return self.rank == self.dim

    @property
    def support(self) -> SquareMatrix:
        return self.blocks.support

    @property
    def kernel_basis(self) -> SquareMatrix:
        return self.eigenvectors[:, ~self.support_mask]

    @property
    def condition(self) -> float:
        return self.blocks.condition()

    def state(self, x) -> complex:
        """φ(x) = tr(dx)."""
        return complex(np.einsum("ij,ji->", self.matrix, as_square_matrix(x)))


def _cluster(w: np.ndarray, u: SquareMatrix, tol: float) -> BlockSpectrum:
    idx = np.flatnonzero(w > 0)
    lam = w[idx]
    labels = np.zeros(idx.size, dtype=int)
    first = 0
    for i in range(1, idx.size):
        # Measured from the smallest member, so a block never spans more than tol.
        if (lam[i] - lam[first]) / lam[i] > tol:
            labels[i] = labels[i - 1] + 1
            first = i
        else:
            labels[i] = labels[i - 1]
    values = np.array([lam[labels == k].mean() for k in range(labels[-1] + 1)])
    logger.debug(f"clustered {idx.size} eigenvalues into {values.size} blocks (tol={tol:g})")
    return BlockSpectrum(values, u[:, idx], labels)


def _from_spectrum(w: np.ndarray, u: SquareMatrix, cluster_tol: float) -> Density:
    w = w / w.sum()
    matrix = (u * w) @ adjoint(u)
    return Density(matrix, w, u, _cluster(w, u, cluster_tol), cluster_tol)


def make_density(a, *, cluster_tol: float = settings.CLUSTER_TOL) -> Density:
    """Normalize a nonzero PSD matrix to trace one and compute its blocks."""
    a = as_square_matrix(a)
    w, u = hermitian_eigh(a)
    if not np.any(w != 0):
        raise ZeroTrace("cannot normalize the zero matrix")
    check_psd_spectrum(w, name="density")
    w = np.where(kernel_mask(w), 0.0, w)
    if w.sum() <= 0:
        raise ZeroTrace(f"trace {w.sum():.3e} is not positive")
    return _from_spectrum(w, u, cluster_tol)


def spectral_blocks(d: Density, cluster_tol: float = settings.CLUSTER_TOL) -> BlockSpectrum:
    if not 0 <= cluster_tol < 1:
        raise InvalidParameter(f"cluster_tol must lie in [0, 1), got {cluster_tol}")
    return _cluster(d.eigenvalues, d.eigenvectors, cluster_tol)


def power_weight(d: Density, alpha: float) -> SquareMatrix:
    """d^α on the support; α = 0 gives the support projection."""
    return d.blocks.weight(alpha)


def discretize(d: Density, eps: float) -> Density:
    """Density with values on the grid λ_max(1+ε)^{-j}, commuting with d.

    Each retained eigenvalue λ is rounded up to the nearest grid value g, so
    λ ≤ g < (1+ε)λ. Renormalizing by c₀ = Σ g ∈ [1, 1+ε) keeps
    (1+ε)⁻¹ d_ε ⪯ d ⪯ (1+ε) d_ε.
    """
    if not eps > 0:
        raise InvalidEpsilon(f"eps must be positive, got {eps}")
    keep = d.support_mask
    lam = d.eigenvalues[keep]
    top = lam.max()
    steps = np.floor(np.log(top / lam) / np.log1p(eps) + 1e-9)
    grid = top * (1.0 + eps) ** (-steps)
    w = np.zeros_like(d.eigenvalues)
    w[keep] = grid
    c0 = float(grid.sum())
    result = _from_spectrum(w, d.eigenvectors, d.cluster_tol)
    logger.debug(f"discretized {lam.size} eigenvalues onto {np.unique(steps).size} grid values, "
                 f"normalization {c0:.6f}, sandwich constant {max(c0, (1 + eps) / c0):.6f}")
    return result


def sandwich_constant(d: Density, other: Density) -> float:
    """Least c with c⁻¹·other ⪯ d ⪯ c·other on the common support."""
    require_same_dim(d.matrix, other.matrix)
    basis = d.eigenvectors[:, d.support_mask]
    ds = adjoint(basis) @ d.matrix @ basis
    os_ = adjoint(basis) @ other.matrix @ basis
    ratios = linalg.eigh((ds + adjoint(ds)) / 2, (os_ + adjoint(os_)) / 2, eigvals_only=True)
    return float(max(ratios.max(), 1.0 / ratios.min()))


class Corners(NamedTuple):
    """x split by the support projection e."""

    inner: SquareMatrix      # e x e
    right: SquareMatrix      # e x (1 − e)
    left: SquareMatrix       # (1 − e) x e
    outer: SquareMatrix      # (1 − e) x (1 − e)


def corners(x, d: Density) -> Corners:
    x = as_square_matrix(x)
    e = d.support
    f = np.eye(d.dim) - e
    return Corners(e @ x @ e, e @ x @ f, f @ x @ e, f @ x @ f)


def off_support_norm(x, d: Density) -> float:
    """‖(1 − e) x (1 − e)‖_2, the part every weighted seminorm ignores."""
    k = d.kernel_basis
    if k.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(adjoint(k) @ as_square_matrix(x) @ k))
