"""Trace inequalities for positive matrices and the positive-quadrant split."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from .exceptions import BadExponents, InvalidParameter
from .matcore import (
    Exponent,
    PNorm,
    SquareMatrix,
    as_square_matrix,
    check_psd_spectrum,
    fractional_power,
    hermitian_eigh,
    hermitian_part,
    kernel_mask,
    operator_norm,
    require_psd,
    require_same_dim,
    schatten_norm,
    skew_part,
    spectral_parts,
)
from .reports import CheckReport, make_report
from .spaces import ptd_norm

logger = logging.getLogger(__name__)

GAUSS_NODES = 32


def _finite_exponent(p: Exponent, low: float, name: str = "p") -> PNorm:
    p = PNorm.of(p)
    if p.is_infinite or p.exact < low:
        raise BadExponents(f"{name} must lie in [{low:g}, inf), got {p}")
    return p


def _trace_power(a: SquareMatrix, p: float) -> float:
    """tr(a^p) for PSD a."""
    w, _ = hermitian_eigh(a)
    check_psd_spectrum(w)
    w = np.where(kernel_mask(w), 0.0, w)
    return float(np.sum(w ** p))


def _trace_against(a: SquareMatrix, power: float, x: SquareMatrix) -> float:
    """Re tr(a^power x)."""
    return float(np.real(np.einsum("ij,ji->", fractional_power(a, power), x)))


def _psd_pair(a, x) -> tuple[SquareMatrix, SquareMatrix]:
    a = require_psd(a, name="a")
    x = require_psd(x, name="x")
    require_same_dim(a, x)
    return a, x


def increment(a: SquareMatrix, x: SquareMatrix, p: float) -> float:
    """‖a + x‖_p^p − ‖a‖_p^p."""
    return _trace_power(a + x, p) - _trace_power(a, p)


def check_diff_inequality(a, x, p: Exponent, *, seed: int = 0) -> CheckReport:
    """‖a+x‖_p^p ≤ ‖a‖_p^p + p 2^{p−1} max{‖a^{p−1}x‖_1, ‖x‖_p^p}."""
    p = _finite_exponent(p, 2)
    a, x = _psd_pair(a, x)
    pv = p.value
    xi = max(schatten_norm(fractional_power(a, pv - 1.0) @ x, 1), schatten_norm(x, p) ** pv)
    rhs = pv * 2.0 ** (pv - 1.0) * xi
    notes = [f"xi={xi:.12g}"]
    if p.exact == 2:
        # The inequality is stated for 2 < p in one place and 2 <= p in another.
        notes.append("boundary exponent p=2")
    return make_report(
        "diff-inequality",
        inputs=[a, x],
        lhs=increment(a, x, pv),
        rhs=rhs,
        tolerance=1e-9 * max(1.0, rhs),
        seed=seed,
        params=[pv],
        notes=notes,
    )


def check_integral_identity(a, x, p: Exponent, *, nodes: int = GAUSS_NODES, seed: int = 0) -> CheckReport:
    """tr((a+x)^p) − tr(a^p) = p ∫_0^1 tr((a+sx)^{p−1}x) ds by Gauss–Legendre."""
    p = _finite_exponent(p, 1)
    if p.exact == 1:
        raise BadExponents("the integral identity needs p > 1")
    a, x = _psd_pair(a, x)
    pv = p.value
    t, w = np.polynomial.legendre.leggauss(nodes)
    s = (t + 1.0) / 2.0
    integral = pv * sum(wk / 2.0 * _trace_against(a + sk * x, pv - 1.0, x) for sk, wk in zip(s, w))
    diff = increment(a, x, pv)
    return make_report(
        "diff-integral",
        inputs=[a, x],
        lhs=abs(integral - diff),
        rhs=1e-7 * max(1.0, abs(diff)),
        tolerance=0.0,
        seed=seed,
        params=[pv],
        notes=[f"increment={diff:.12g}", f"quadrature={integral:.12g}", f"nodes={nodes}"],
    )


def check_convexity_bound(a, x, p: Exponent, *, seed: int = 0) -> CheckReport:
    """Operator convexity bound p(2^{p−1}−1)/(p−1)·(tr(a^{p−1}x) + tr(x^p)) for 2 ≤ p ≤ 3."""
    p = _finite_exponent(p, 2)
    if p.exact > 3:
        raise BadExponents(f"the convexity bound needs p <= 3, got {p}")
    a, x = _psd_pair(a, x)
    pv = p.value
    rhs = pv * (2.0 ** (pv - 1.0) - 1.0) / (pv - 1.0) * (_trace_against(a, pv - 1.0, x) + _trace_power(x, pv))
    return make_report(
        "convexity-bound",
        inputs=[a, x],
        lhs=increment(a, x, pv),
        rhs=rhs,
        tolerance=1e-9 * max(1.0, rhs),
        seed=seed,
        params=[pv],
    )


def check_commutative_bound(a, x, p: Exponent, *, seed: int = 0) -> CheckReport:
    """(2^p − 1) max{tr(a^{p−1}x), tr(x^p)} for commuting a and x."""
    p = _finite_exponent(p, 2)
    a, x = _psd_pair(a, x)
    scale = max(operator_norm(a) * operator_norm(x), np.finfo(float).tiny)
    commutator = operator_norm(a @ x - x @ a)
    if commutator > 1e-10 * scale:
        raise InvalidParameter(f"a and x do not commute (commutator norm {commutator:.3e})")
    pv = p.value
    rhs = (2.0 ** pv - 1.0) * max(_trace_against(a, pv - 1.0, x), _trace_power(x, pv))
    return make_report(
        "commutative-bound",
        inputs=[a, x],
        lhs=increment(a, x, pv),
        rhs=rhs,
        tolerance=1e-9 * max(1.0, rhs),
        seed=seed,
        params=[pv],
    )


def check_araki_kosaki(a, b, q: Exponent, eta: float, *, seed: int = 0) -> CheckReport:
    """‖a^η b^η‖_{q/η} ≤ ‖ab‖_q^η for 0 < η < 1."""
    if not 0 < eta < 1:
        raise InvalidParameter(f"eta must lie in (0, 1), got {eta}")
    q = PNorm.of(q)
    a, b = _psd_pair(a, b)
    a_eta = fractional_power(a, eta)
    b_eta = fractional_power(b, eta)
    lhs = schatten_norm(a_eta @ b_eta, q.divided_by(eta))
    rhs = schatten_norm(a @ b, q) ** eta
    # Orthogonal supports give rhs = 0; the absolute floor absorbs the roundoff in a^η b^η.
    floor = 1e-14 * operator_norm(a_eta) * operator_norm(b_eta)
    return make_report(
        "araki-kosaki",
        inputs=[a, b],
        lhs=lhs,
        rhs=rhs,
        tolerance=1e-10 * rhs + floor,
        seed=seed,
        params=[float(q), float(eta)],
    )


class PositiveSplit(NamedTuple):
    """x = x0 + i x1 − x2 − i x3 with every part PSD."""

    x0: SquareMatrix
    x1: SquareMatrix
    x2: SquareMatrix
    x3: SquareMatrix

    def resum(self) -> SquareMatrix:
        return sum((1j) ** k * part for k, part in enumerate(self))


def positive_split(x) -> PositiveSplit:
    x = as_square_matrix(x)
    re_pos, re_neg = spectral_parts(hermitian_part(x))
    im_pos, im_neg = spectral_parts(skew_part(x))
    return PositiveSplit(re_pos, im_pos, re_neg, im_neg)


def check_positive_split(x, d, p: Exponent, t: float, *, seed: int = 0) -> CheckReport:
    """max_k ‖x_k‖_{p,t,d} ≤ ‖x‖_{p,t,d}, with the resummation error noted."""
    x = as_square_matrix(x)
    parts = positive_split(x)
    rhs = ptd_norm(x, d, p, t)
    lhs = max(ptd_norm(part, d, p, t) for part in parts)
    resum_error = float(np.abs(parts.resum() - x).max())
    exact = resum_error <= 1e-12 * max(1.0, operator_norm(x))
    return make_report(
        "positive-split",
        inputs=[x, d.matrix],
        lhs=lhs,
        rhs=rhs,
        tolerance=1e-10 * rhs,
        seed=seed,
        params=[float(PNorm.of(p)), float(t)],
        notes=[f"resum_error={resum_error:.3e}"],
        side_ok=exact,
        side_note="resummation error above 1e-12",
    )


def check_derivative(a, x, p: Exponent, s: float = 0.0, h: float = 1e-4, *, seed: int = 0) -> CheckReport:
    """Central difference of s ↦ tr((a+sx)^p) against p tr((a+sx)^{p−1}x).

    Raises NotPSD when a + (s−h)x leaves the positive cone.
    """
    p = _finite_exponent(p, 1)
    if p.exact == 1:
        raise BadExponents("the derivative check needs p > 1")
    if s < 0:
        raise InvalidParameter(f"s must be >= 0, got {s}")
    if not h > 0:
        raise InvalidParameter(f"h must be positive, got {h}")
    a = as_square_matrix(a)
    x = as_square_matrix(x)
    require_same_dim(a, x)
    pv = p.value
    central = (_trace_power(a + (s + h) * x, pv) - _trace_power(a + (s - h) * x, pv)) / (2.0 * h)
    analytic = pv * _trace_against(a + s * x, pv - 1.0, x)
    return make_report(
        "derivative",
        inputs=[a, x],
        lhs=abs(central - analytic),
        rhs=1e-5 * max(1.0, abs(analytic)),
        tolerance=0.0,
        seed=seed,
        params=[pv, float(s), float(h)],
        notes=[f"central={central:.12g}", f"analytic={analytic:.12g}"],
    )
