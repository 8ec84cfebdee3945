"""Weighted norm functionals: one-sided L_{p,q}, Δ_{p,q}, triangular, ‖·‖_{p,t,d}."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple

import numpy as np

from .density import BlockSpectrum, Density, discretize, off_support_norm, power_weight, sandwich_constant
from .exceptions import BadExponents, InvalidParameter
from .matcore import (
    Exponent,
    PNorm,
    SquareMatrix,
    adjoint,
    as_square_matrix,
    func_calculus,
    require_same_dim,
    schatten_norm,
    to_fraction,
)
from .reports import CheckReport, make_report

logger = logging.getLogger(__name__)

Side = Literal["left", "right"]
Part = Literal["upper", "lower"]


@dataclass(frozen=True)
class ExponentSpec:
    """1 ≤ q < p ≤ ∞ with 1/s = 1/q − 1/p."""

    p: PNorm
    q: PNorm

    def __post_init__(self):
        object.__setattr__(self, "p", PNorm.of(self.p))
        object.__setattr__(self, "q", PNorm.of(self.q))
        if self.q.is_infinite or self.q.reciprocal <= self.p.reciprocal:
            raise BadExponents(f"need 1 <= q < p <= inf, got q={self.q}, p={self.p}")

    @classmethod
    def of(cls, p: Exponent, q: Exponent) -> "ExponentSpec":
        return cls(PNorm.of(p), PNorm.of(q))

    @property
    def exact_alpha(self) -> Fraction:
        """1/q − 1/p = 1/s as an exact rational."""
        return self.q.reciprocal - self.p.reciprocal

    @property
    def alpha(self) -> float:
        return float(self.exact_alpha)

    @property
    def s(self) -> PNorm:
        return PNorm(1 / self.exact_alpha)

    def interpolate(self, theta: float) -> PNorm:
        """r with 1/r = (1 − θ)/p + θ/q."""
        theta = to_fraction(theta)
        if not 0 <= theta <= 1:
            raise InvalidParameter(f"theta must lie in [0, 1], got {theta}")
        inv = (1 - theta) * self.p.reciprocal + theta * self.q.reciprocal
        return PNorm(1 / inv)


def _check_side(side: str):
    if side not in ("left", "right"):
        raise InvalidParameter(f"side must be 'left' or 'right', got {side!r}")


def weighted_norm(x, d: Density, spec: ExponentSpec, side: Side = "left") -> float:
    """‖d^{1/q−1/p} x‖_q (left) or ‖x d^{1/q−1/p}‖_q (right)."""
    _check_side(side)
    x = as_square_matrix(x)
    require_same_dim(x, d.matrix)
    w = power_weight(d, spec.alpha)
    return schatten_norm(w @ x if side == "left" else x @ w, spec.q)


def delta_norm(x, d: Density, spec: ExponentSpec) -> float:
    """max of the two one-sided norms; a seminorm when d is not faithful."""
    return max(weighted_norm(x, d, spec, "left"), weighted_norm(x, d, spec, "right"))


class Seminorm(NamedTuple):
    value: float
    annihilated: float
    faithful: bool


def delta_seminorm(x, d: Density, spec: ExponentSpec) -> Seminorm:
    """Δ value together with the size of the corner (1−e)x(1−e) it ignores."""
    return Seminorm(delta_norm(x, d, spec), off_support_norm(x, d), d.is_faithful)


def ptd_norm(x, d: Density, p: Exponent, t: float) -> float:
    """max{ t^{1/p}‖x‖_p, t‖d^{1/p′}x‖_1, t‖x d^{1/p′}‖_1 } for p ≥ 2."""
    p = PNorm.of(p)
    if p.reciprocal > Fraction(1, 2):
        raise BadExponents(f"the p,t,d norm needs p >= 2, got {p}")
    if not t > 0:
        raise InvalidParameter(f"t must be positive, got {t}")
    x = as_square_matrix(x)
    require_same_dim(x, d.matrix)
    w = power_weight(d, float(p.conjugate().reciprocal))
    return max(
        t ** float(p.reciprocal) * schatten_norm(x, p),
        t * schatten_norm(w @ x, 1),
        t * schatten_norm(x @ w, 1),
    )


def symmetric_modulus(x) -> SquareMatrix:
    """|x|_s = ((x*x + xx*)/2)^{1/2}."""
    x = as_square_matrix(x)
    return func_calculus((adjoint(x) @ x + x @ adjoint(x)) / 2, np.sqrt)


def triangular_compress(x, blocks: BlockSpectrum, part: Part = "upper") -> SquareMatrix:
    """Σ_{i≤j} e_i x e_j (upper) or Σ_{i>j} e_i x e_j (lower)."""
    x = as_square_matrix(x)
    require_same_dim(x, blocks.basis)
    c = blocks.to_eigenbasis(x)
    return blocks.from_eigenbasis(np.where(blocks.triangle_mask(part), c, 0))


def triangular_weighted_norm(x, blocks: BlockSpectrum, q: Exponent, alpha: float,
                             part: Part = "upper", side: Side = "left") -> float:
    """‖Σ d_i^α e_i x e_j‖_q over the chosen triangle; d_j^α on the right side."""
    _check_side(side)
    t = triangular_compress(x, blocks, part)
    w = blocks.weight(alpha)
    return schatten_norm(w @ t if side == "left" else t @ w, q)


def check_discretization(x, d: Density, spec: ExponentSpec, eps: float, *, seed: int = 0) -> CheckReport:
    """Δ norms for d and its grid discretization agree up to (1+ε)^{1/s}."""
    d_eps = discretize(d, eps)
    exact = delta_norm(x, d, spec)
    grid = delta_norm(x, d_eps, spec)
    if exact == 0.0 and grid == 0.0:
        ratio = 1.0
    elif exact == 0.0 or grid == 0.0:
        ratio = np.inf
    else:
        ratio = max(exact / grid, grid / exact)
    bound = (1.0 + eps) ** spec.alpha
    return make_report(
        "discretization",
        inputs=[as_square_matrix(x), d.matrix],
        lhs=ratio,
        rhs=bound,
        tolerance=1e-10 * bound,
        seed=seed,
        params=[float(spec.p), float(spec.q), float(eps)],
        notes=[f"sandwich={sandwich_constant(d, d_eps):.12g}"],
    )
