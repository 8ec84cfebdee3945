"""Change-of-density embedding u with x = d^α u(x) + u(x) d^α, α = 1/q − 1/p."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from config import settings

from .density import Density, make_density, off_support_norm, power_weight
from .exceptions import BadExponents, CornerNotAnnihilated, DegenerateBasis, InvalidParameter, ReconstructionFailed
from .matcore import Exponent, PNorm, SquareMatrix, adjoint, as_square_matrix, require_same_dim, schatten_norm
from .randomgen import trial_rng
from .schur import inverse_sum_symbol
from .spaces import ExponentSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Linearly independent matrices spanning a subspace X of L_q."""

    vectors: tuple

    def __post_init__(self):
        vectors = tuple(as_square_matrix(v) for v in self.vectors)
        if not vectors:
            raise DegenerateBasis("basis is empty")
        require_same_dim(*vectors)
        object.__setattr__(self, "vectors", vectors)
        w = np.linalg.eigvalsh(self.gram())
        if w.min() < settings.GRAM_TOL * w.max():
            raise DegenerateBasis(f"Gram matrix is numerically singular (eigenvalues {w.min():.3e} .. {w.max():.3e})")

    @property
    def dim_ambient(self) -> int:
        return self.vectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.vectors)

    def gram(self) -> np.ndarray:
        flat = np.stack([v.ravel() for v in self.vectors])
        return np.conj(flat) @ flat.T

    def combine(self, coefficients: Sequence[complex]) -> SquareMatrix:
        return np.tensordot(np.asarray(coefficients), np.stack(self.vectors), axes=1)


def embed_u(x, d: Density, q: Exponent, p: Exponent) -> SquareMatrix:
    """u(x) built corner by corner.

    e x e is divided blockwise by d_i^α + d_j^α; e x (1−e) gets d^{−α} on the
    left and (1−e) x e gets d^{−α} on the right. The corner (1−e) x (1−e)
    must vanish.
    """
    spec = ExponentSpec.of(p, q)
    x = as_square_matrix(x)
    require_same_dim(x, d.matrix)
    outer = off_support_norm(x, d)
    if outer > settings.CORNER_TOL * np.linalg.norm(x):
        raise CornerNotAnnihilated(f"(1-e)x(1-e) has norm {outer:.3e}")
    alpha = spec.alpha
    blocks = d.blocks
    table = blocks.expand(inverse_sum_symbol(alpha).table(blocks))
    inner = blocks.from_eigenbasis(table * blocks.to_eigenbasis(x))
    kernel = d.kernel_basis
    if kernel.shape[1] == 0:
        return inner
    e = blocks.support
    f = kernel @ adjoint(kernel)
    inverse = blocks.weight(-alpha)
    return inner + inverse @ (e @ x @ f) + (f @ x @ e) @ inverse


def reconstruct(u, d: Density, q: Exponent, p: Exponent) -> SquareMatrix:
    """Left inverse v(u) = d^α u + u d^α."""
    alpha = ExponentSpec.of(p, q).alpha
    u = as_square_matrix(u)
    require_same_dim(u, d.matrix)
    w = power_weight(d, alpha)
    return w @ u + u @ w


def _relative_residual(x: SquareMatrix, d: Density, q: PNorm, p: PNorm) -> float:
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return 0.0
    allowed = x - (np.eye(d.dim) - d.support) @ x @ (np.eye(d.dim) - d.support)
    return float(np.linalg.norm(reconstruct(embed_u(x, d, q, p), d, q, p) - allowed) / norm)


@dataclass(frozen=True, eq=False)
class EmbeddingResult:
    """u for a fixed (d, q, p), certified on a basis."""

    density: Density
    q: PNorm
    p: PNorm
    alpha: float
    symbol: np.ndarray
    support_rank: int
    reconstruction_residual: float

    def u_of(self, x) -> SquareMatrix:
        return embed_u(x, self.density, self.q, self.p)

    __call__ = u_of

    def inverse(self, u) -> SquareMatrix:
        return reconstruct(u, self.density, self.q, self.p)


def build_embedding(basis: SubspaceBasis, d: Density, q: Exponent, p: Exponent) -> EmbeddingResult:
    spec = ExponentSpec.of(p, q)
    residual = max(_relative_residual(v, d, spec.q, spec.p) for v in basis.vectors)
    if residual > settings.RECONSTRUCTION_TOL:
        raise ReconstructionFailed(f"reconstruction residual {residual:.3e} exceeds {settings.RECONSTRUCTION_TOL:g}")
    return EmbeddingResult(
        density=d,
        q=spec.q,
        p=spec.p,
        alpha=spec.alpha,
        symbol=inverse_sum_symbol(spec.alpha).table(d.blocks),
        support_rank=d.rank,
        reconstruction_residual=residual,
    )


class Distortion(NamedTuple):
    lower: float
    upper: float


def subspace_distortion(basis: SubspaceBasis, d: Density, q: Exponent, p: Exponent,
                        trials: int, seed: int, *, jobs: int = 1) -> Distortion:
    """min and max of ‖u(x)‖_p over random unit-‖·‖_q elements of X."""
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    embedding = build_embedding(basis, d, q, p)

    def sample(t: int) -> float:
        rng = trial_rng(seed, t)
        k = len(basis)
        c = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2)
        x = basis.combine(c)
        x = x / schatten_norm(x, embedding.q)
        return schatten_norm(embedding(x), embedding.p)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(sample, range(trials)))
    else:
        values = [sample(t) for t in range(trials)]
    result = Distortion(min(values), max(values))
    logger.info(f"distortion over {trials} samples: [{result.lower:.6g}, {result.upper:.6g}], "
                f"ratio {result.upper / result.lower:.4g}")
    return result


class Balance(NamedTuple):
    t_star: float
    value: float


def balance_objective(t: float, alpha: float, beta: float, p: Exponent, q: Exponent) -> float:
    """max{ t^{1/p − 1/q} α, t^{1 − 1/q} β }."""
    p, q = PNorm.of(p), PNorm.of(q)
    ip, iq = float(p.reciprocal), float(q.reciprocal)
    return max(t ** (ip - iq) * alpha, t ** (1.0 - iq) * beta)


def balance_parameter(alpha: float, beta: float, p: Exponent, q: Exponent) -> Balance:
    """Minimizer t = (α/β)^{p′} of balance_objective and its value α^{p′/q′} β^{1 − p′/q′}."""
    p, q = PNorm.of(p), PNorm.of(q)
    if p.is_infinite or q.reciprocal > 0.5 or q.reciprocal <= p.reciprocal:
        raise BadExponents(f"need 2 <= q < p < inf, got q={q}, p={p}")
    if not (alpha > 0 and beta > 0):
        raise InvalidParameter(f"alpha and beta must be positive, got {alpha}, {beta}")
    p_conj = float(p.conjugate().exact)
    ratio = p_conj / float(q.conjugate().exact)
    return Balance((alpha / beta) ** p_conj, alpha ** ratio * beta ** (1.0 - ratio))


def heuristic_density(basis: SubspaceBasis) -> Density:
    """Trace-normalized Σ_k |b_k|_s²; a heuristic starting density, not an optimal one."""
    total = sum((adjoint(b) @ b + b @ adjoint(b)) / 2 for b in basis.vectors)
    return make_density(total)
