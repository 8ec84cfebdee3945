"""Schur multipliers in the density eigenbasis.

Every map here multiplies the block e_i x e_j by a scalar m(d_i, d_j). The
computation is entrywise in the block basis of the support, so resolvents
such as (L_{d^α} + R_{d^α})^{-1} are exact divisions rather than Sylvester
solves.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from config import settings

from .density import BlockSpectrum, Density, power_weight
from .exceptions import BadExponents, IllConditioned, NotTriangular, SymbolAsymmetric, SymbolUndefined
from .matcore import Exponent, SquareMatrix, as_square_matrix, require_same_dim, schatten_norm
from .reports import CheckReport, make_report
from .spaces import ExponentSpec, Part

logger = logging.getLogger(__name__)

SymbolFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MultiplierSymbol:
    """m(d_i, d_j), evaluated on broadcast arrays of block values."""

    eval: SymbolFunction
    symmetric: bool = False
    name: str = "symbol"

    def table(self, blocks: BlockSpectrum) -> np.ndarray:
        di = blocks.values[:, None]
        dj = blocks.values[None, :]
        with np.errstate(all="ignore"):
            table = np.broadcast_to(np.asarray(self.eval(di, dj), dtype=float), (blocks.count, blocks.count))
        if not np.all(np.isfinite(table)):
            i, j = np.argwhere(~np.isfinite(table))[0]
            raise SymbolUndefined(f"{self.name} is not finite at block pair ({i}, {j})")
        if self.symmetric and not np.allclose(table, table.T, rtol=1e-12, atol=1e-15):
            raise SymbolAsymmetric(f"{self.name} is declared symmetric but its table is not")
        return np.array(table)


def min_symbol() -> MultiplierSymbol:
    return MultiplierSymbol(lambda a, b: np.minimum(a, b) / (a + b), True, "min/(s+t)")


def max_symbol() -> MultiplierSymbol:
    return MultiplierSymbol(lambda a, b: np.maximum(a, b) / (a + b), True, "max/(s+t)")


def sum_symbol(beta: float) -> MultiplierSymbol:
    return MultiplierSymbol(lambda a, b: a ** beta + b ** beta, True, f"s^{beta:g}+t^{beta:g}")


def inverse_sum_symbol(alpha: float) -> MultiplierSymbol:
    return MultiplierSymbol(lambda a, b: 1.0 / (a ** alpha + b ** alpha), True, f"1/(s^{alpha:g}+t^{alpha:g})")


def resolvent_symbol(beta: float, eta: float) -> MultiplierSymbol:
    """d_i^{(1−η)β} d_j^{ηβ} / (d_i^β + d_j^β)."""
    return MultiplierSymbol(
        lambda a, b: a ** ((1 - eta) * beta) * b ** (eta * beta) / (a ** beta + b ** beta),
        eta == 0.5,
        f"resolvent(beta={beta:g}, eta={eta:g})",
    )


def left_share_symbol(gamma: float) -> MultiplierSymbol:
    """(L_{d^γ} + R_{d^γ})^{-1} L_{d^γ}."""
    return MultiplierSymbol(lambda a, b: a ** gamma / (a ** gamma + b ** gamma), False, f"left_share({gamma:g})")


def right_share_symbol(gamma: float) -> MultiplierSymbol:
    """(L_{d^γ} + R_{d^γ})^{-1} R_{d^γ}."""
    return MultiplierSymbol(lambda a, b: b ** gamma / (a ** gamma + b ** gamma), False, f"right_share({gamma:g})")


def symbol_condition(blocks: BlockSpectrum, alpha: float) -> float:
    """max_k d_k^α / min_k d_k^α."""
    return blocks.condition(abs(alpha)) if alpha else 1.0


def _warn_conditioning(blocks: BlockSpectrum, alpha: float):
    cond = symbol_condition(blocks, alpha)
    if cond > settings.ILL_CONDITIONED:
        message = f"weight ratio {cond:.3e} exceeds {settings.ILL_CONDITIONED:.0e}"
        logger.warning(message)
        warnings.warn(message, IllConditioned, stacklevel=3)


def schur_apply(x, blocks: BlockSpectrum, m: MultiplierSymbol) -> SquareMatrix:
    """Σ_{i,j} m(d_i, d_j) e_i x e_j; the part of x off e ⊗ e is dropped."""
    x = as_square_matrix(x)
    require_same_dim(x, blocks.basis)
    table = m.table(blocks)
    c = blocks.to_eigenbasis(x)
    if logger.isEnabledFor(logging.DEBUG):
        dropped = np.linalg.norm(x - blocks.from_eigenbasis(c))
        logger.debug(f"{m.name}: annihilated off-support part of norm {dropped:.3e}")
    return blocks.from_eigenbasis(blocks.expand(table) * c)


def min_multiplier(x, blocks: BlockSpectrum) -> SquareMatrix:
    """M_a with symbol min(d_i, d_j)/(d_i + d_j); norm 1/2 on every L_p."""
    return schur_apply(x, blocks, min_symbol())


def resolvent_weighted(y, blocks: BlockSpectrum, beta: float, eta: float) -> SquareMatrix:
    """L_{d^{(1−η)β}} R_{d^{ηβ}} (L_{d^β} + R_{d^β})^{-1}(y)."""
    if not 0 <= eta <= 1:
        raise BadExponents(f"eta must lie in [0, 1], got {eta}")
    _warn_conditioning(blocks, beta)
    return schur_apply(y, blocks, resolvent_symbol(beta, eta))


def qr_embed(x, d: Density, p: Exponent, r: Exponent) -> tuple[SquareMatrix, SquareMatrix]:
    """x ↦ (d^α x, x d^α) with α = 1/r − 1/p."""
    alpha = ExponentSpec.of(p, r).alpha
    x = as_square_matrix(x)
    w = power_weight(d, alpha)
    return w @ x, x @ w


def qr_project(y, z, d: Density, p: Exponent, r: Exponent) -> SquareMatrix:
    """(L_{d^α} + R_{d^α})^{-1}(y + z), α = 1/r − 1/p; inverts qr_embed on e x e."""
    alpha = ExponentSpec.of(p, r).alpha
    y = as_square_matrix(y)
    z = as_square_matrix(z)
    require_same_dim(y, z, d.matrix)
    _warn_conditioning(d.blocks, alpha)
    return schur_apply(y + z, d.blocks, inverse_sum_symbol(alpha))


def require_triangular(x: SquareMatrix, blocks: BlockSpectrum, part: Part = "upper", *,
                       tol: float = settings.TRIANGULAR_TOL, name: str = "input"):
    c = blocks.to_eigenbasis(x)
    mask = blocks.triangle_mask(part)
    off = np.linalg.norm(np.where(mask, 0, c))
    if off > tol * np.linalg.norm(x):
        raise NotTriangular(f"{name} has {'lower' if part == 'upper' else 'upper'} part of norm {off:.3e}")


def _split_shares(y, z, blocks: BlockSpectrum, gamma: float) -> SquareMatrix:
    return schur_apply(y, blocks, left_share_symbol(gamma)) + schur_apply(z, blocks, right_share_symbol(gamma))


def lambda_map(y, z, blocks: BlockSpectrum, alpha: float, part: Part = "upper") -> SquareMatrix:
    """(L_{d^α} + R_{d^α})^{-1}(d^α y + z d^α) on triangular inputs; Λ(x, x) = x."""
    y = as_square_matrix(y)
    z = as_square_matrix(z)
    require_same_dim(y, z, blocks.basis)
    require_triangular(y, blocks, part, name="y")
    require_triangular(z, blocks, part, name="z")
    _warn_conditioning(blocks, alpha)
    return _split_shares(y, z, blocks, alpha)


def referee_project(y, z, blocks: BlockSpectrum, alpha0: float, alpha1: float, part: Part = "upper") -> SquareMatrix:
    """x = (L_{d^γ} + R_{d^γ})^{-1}(L_{d^γ} y + R_{d^γ} z), γ = α0 + α1."""
    if alpha0 < 0 or alpha1 < 0 or alpha0 + alpha1 <= 0:
        raise BadExponents(f"need alpha0, alpha1 >= 0 with positive sum, got ({alpha0}, {alpha1})")
    y = as_square_matrix(y)
    z = as_square_matrix(z)
    require_same_dim(y, z, blocks.basis)
    require_triangular(y, blocks, part, name="y")
    require_triangular(z, blocks, part, name="z")
    gamma = alpha0 + alpha1
    _warn_conditioning(blocks, gamma)
    return _split_shares(y, z, blocks, gamma)


def referee_cross_ratios(y, z, blocks: BlockSpectrum, alpha0: float, alpha1: float,
                         q: Exponent) -> dict[str, float]:
    """The one-sided ratios bounded by 3/2 in the referee projection argument.

    Keys name (weight index j, output side, input). Row norms weight on the
    left (‖d^{α_j} ·‖_q), column norms on the right (‖· d^{α_j}‖_q).
    """
    gamma = alpha0 + alpha1
    a_y = schur_apply(y, blocks, left_share_symbol(gamma))
    b_z = schur_apply(z, blocks, right_share_symbol(gamma))
    ratios = {}
    for j, alpha in enumerate((alpha0, alpha1)):
        w = blocks.weight(alpha)
        row_y = schatten_norm(w @ y, q)
        col_z = schatten_norm(z @ w, q)
        ratios[f"{j}:row<-y"] = _safe_ratio(schatten_norm(w @ a_y, q), row_y)
        ratios[f"{j}:col<-z"] = _safe_ratio(schatten_norm(b_z @ w, q), col_z)
        ratios[f"{j}:col<-y"] = _safe_ratio(schatten_norm(a_y @ w, q), row_y)
        ratios[f"{j}:row<-z"] = _safe_ratio(schatten_norm(w @ b_z, q), col_z)
    return ratios


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


# --- positive definiteness of 1/(1 + e^{|x|}) -------------------------------

def kernel_profile(x: np.ndarray) -> np.ndarray:
    """f(x) = 1/(1 + e^{|x|})."""
    return 0.5 * (1.0 - np.tanh(np.abs(x) / 2.0))


def kernel_slope(x: np.ndarray) -> np.ndarray:
    """g(x) = −f′(x) = e^{−x}/(1 + e^{−x})² for x ≥ 0."""
    return 0.25 / np.cosh(np.asarray(x) / 2.0) ** 2


def kernel_transform(xi: float) -> float:
    """f̂(ξ) = ∫ f(x) e^{−ixξ} dx = 2∫_0^∞ f(x) cos(xξ) dx (f is even)."""
    xi = abs(float(xi))
    if xi == 0.0:
        value, _ = integrate.quad(kernel_profile, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    else:
        value, _ = integrate.quad(kernel_profile, 0.0, np.inf, weight="cos", wvar=xi, limlst=200)
    return 2.0 * value


def _gauss_nodes(quad_points: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(quad_points // panels)
    width = 2.0 * np.pi / panels
    starts = np.arange(panels) * width
    x = (starts[:, None] + (nodes[None, :] + 1.0) * width / 2.0).ravel()
    w = np.tile(weights * width / 2.0, panels)
    return x, w


def gamma_coefficients(xi: float, kmax: int, quad_points: int = 64) -> np.ndarray:
    """γ_k = ∫_0^{2π} g((x + 2πk)/ξ) sin(x) dx for k = 0..kmax."""
    panels = max(1, quad_points // 16)
    x, w = _gauss_nodes(quad_points, panels)
    k = np.arange(kmax + 1)
    with np.errstate(over="ignore"):
        values = kernel_slope((x[None, :] + 2.0 * np.pi * k[:, None]) / xi)
    return values @ (w * np.sin(x))


def kernel_positivity_check(kmax: int, quad_points: int, *, xis=(0.25, 0.5, 1.0, 2.0, 4.0, 8.0),
                            seed: int = 0) -> CheckReport:
    """Certify that 1/(1 + e^{|x|}) is positive definite on a grid of ξ.

    Reports min γ_k over the ξ grid (pass needs ≥ −1e-12), the direct
    transform minimum (≥ −1e-10), f̂(0) against 2 ln 2, and the gap between
    the direct transform and the series (2/ξ²)Σγ_k.
    """
    if kmax < 1 or quad_points < 64:
        raise BadExponents(f"need kmax >= 1 and quad_points >= 64, got {kmax}, {quad_points}")
    xis = sorted({1.0, *map(float, xis)})
    min_gamma = math.inf
    series_gap = 0.0
    transforms = []
    for xi in xis:
        gamma = gamma_coefficients(xi, kmax, quad_points)
        min_gamma = min(min_gamma, float(gamma.min()))
        direct = kernel_transform(xi)
        series = 2.0 / xi ** 2 * float(gamma.sum())
        transforms.append(direct)
        series_gap = max(series_gap, abs(direct - series))
    f0 = kernel_transform(0.0)
    min_transform = min(transforms + [f0])
    notes = [
        f"min_gamma={min_gamma:.3e}",
        f"min_transform={min_transform:.6e}",
        f"f_hat(0)={f0:.12f}",
        f"series_gap={series_gap:.3e}",
    ]
    side_ok = min_transform >= -1e-10 and abs(f0 - 2 * math.log(2)) <= 1e-8
    return make_report(
        "kernel-positivity",
        inputs=[np.array([kmax, quad_points], dtype=float), np.asarray(xis)],
        lhs=-min_gamma,
        rhs=0.0,
        tolerance=1e-12,
        seed=seed,
        params=[float(kmax), float(quad_points)],
        notes=notes,
        side_ok=side_ok,
        side_note="transform negative or f_hat(0) off 2 ln 2",
    )
