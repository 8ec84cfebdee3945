"""Hermitian linear algebra: functional calculus, Schatten norms and the trace pairing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np
import numpy.typing as npt
from scipy import linalg

from config import settings

from .exceptions import BadExponents, DimMismatch, DomainError, InvalidParameter, NotHermitian, NotPSD

logger = logging.getLogger(__name__)

SquareMatrix = npt.NDArray[np.complex128]
ScalarFunction = Callable[[np.ndarray], np.ndarray]
Exponent = Union["PNorm", int, float, Fraction, str]


def to_fraction(value: Union[int, float, Fraction, str]) -> Fraction:
    """Exact rational for a finite exponent; floats are read through their repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise InvalidParameter(f"expected a finite number, got {value}")
        return Fraction(repr(float(value)))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class PNorm:
    """Schatten exponent in [1, ∞]; ``exact is None`` encodes ∞."""

    exact: Fraction | None

    def __post_init__(self):
        if self.exact is not None and self.exact < 1:
            raise BadExponents(f"Schatten exponent must be >= 1, got {self.exact}")

    @classmethod
    def infinity(cls) -> "PNorm":
        return cls(None)

    @classmethod
    def of(cls, value: Exponent) -> "PNorm":
        if isinstance(value, PNorm):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, (float, np.floating)) and math.isinf(value) and value > 0:
            return cls(None)
        return cls(to_fraction(value))

    @classmethod
    def parse(cls, text: str) -> "PNorm":
        token = text.strip().lower()
        if token in ("inf", "infinity", "∞", "+inf"):
            return cls(None)
        try:
            return cls(Fraction(token))
        except (ValueError, ZeroDivisionError) as exc:
            raise BadExponents(f"cannot read exponent {text!r}") from exc

    @property
    def is_infinite(self) -> bool:
        return self.exact is None

    @property
    def reciprocal(self) -> Fraction:
        return Fraction(0) if self.exact is None else 1 / self.exact

    @property
    def value(self) -> float:
        return math.inf if self.exact is None else float(self.exact)

    def conjugate(self) -> "PNorm":
        if self.exact is None:
            return PNorm(Fraction(1))
        if self.exact == 1:
            return PNorm(None)
        return PNorm(self.exact / (self.exact - 1))

    def divided_by(self, eta: Union[float, Fraction]) -> "PNorm":
        """The exponent p/η (used by Araki–Kosaki type estimates)."""
        if self.exact is None:
            return self
        return PNorm(self.exact / to_fraction(eta))

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return "inf" if self.exact is None else str(self.exact)


def as_square_matrix(x) -> SquareMatrix:
    """Validate and promote to a dense complex square matrix."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimMismatch(f"expected a nonempty square matrix, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameter("matrix has non-finite entries")
    return arr


def require_same_dim(*mats: SquareMatrix) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def adjoint(x: SquareMatrix) -> SquareMatrix:
    return np.conj(x).T


def hermitian_part(x: SquareMatrix) -> SquareMatrix:
    x = as_square_matrix(x)
    return (x + adjoint(x)) / 2


def skew_part(x: SquareMatrix) -> SquareMatrix:
    """Im x = (x − x*)/(2i), Hermitian."""
    x = as_square_matrix(x)
    return (x - adjoint(x)) / 2j


def operator_norm(x: SquareMatrix) -> float:
    return float(linalg.norm(x, 2))


def hermitian_eigh(a, *, tol: float = settings.HERMITIAN_TOL) -> tuple[np.ndarray, SquareMatrix]:
    """Eigendecomposition of the symmetrized input after a Hermiticity check."""
    a = as_square_matrix(a)
    residual = operator_norm(a - adjoint(a))
    if residual > tol * max(1.0, operator_norm(a)):
        raise NotHermitian(f"symmetry residual {residual:.3e} exceeds tolerance")
    w, u = linalg.eigh((a + adjoint(a)) / 2)
    return w, u


def kernel_mask(w: np.ndarray, *, psd: bool = True,
                threshold: float = settings.KERNEL_THRESHOLD) -> np.ndarray:
    """Eigenvalues treated as exact zeros."""
    scale = float(np.abs(w).max()) if w.size else 0.0
    if psd:
        return w <= threshold * scale
    return np.abs(w) <= threshold * scale


def check_psd_spectrum(w: np.ndarray, *, tol: float = settings.NEGATIVE_EIGEN_TOL, name: str = "matrix"):
    top = float(w.max()) if w.size else 0.0
    if w.size and w.min() < -tol * max(top, 0.0):
        raise NotPSD(f"{name} has eigenvalue {w.min():.3e} below -{tol:g}*lambda_max")


def require_psd(a, *, name: str = "matrix") -> SquareMatrix:
    a = as_square_matrix(a)
    w, _ = hermitian_eigh(a)
    check_psd_spectrum(w, name=name)
    return a


def func_calculus(a, f: ScalarFunction, *, psd: bool = True,
                  tol: float = settings.HERMITIAN_TOL,
                  threshold: float = settings.KERNEL_THRESHOLD) -> SquareMatrix:
    """U f(Λ) U* on the clipped spectrum of a Hermitian matrix.

    Eigenvalues at or below the kernel threshold go to f(0) when that is
    finite and to 0 otherwise, so negative powers act on the support only.
    With ``psd=False`` the whole real spectrum is kept (spectral parts of a
    Hermitian matrix).
    """
    w, u = hermitian_eigh(a, tol=tol)
    if psd:
        check_psd_spectrum(w)
    kernel = kernel_mask(w, psd=psd, threshold=threshold)
    retained = ~kernel
    fw = np.zeros_like(w)
    with np.errstate(all="ignore"):
        if retained.any():
            fw[retained] = np.asarray(f(w[retained]), dtype=float)
            bad = ~np.isfinite(fw[retained])
            if bad.any():
                raise DomainError(f"function undefined at eigenvalue {w[retained][bad][0]:.6g}")
        if kernel.any():
            f0 = float(np.asarray(f(np.zeros(1)), dtype=float)[0])
            if math.isfinite(f0):
                fw[kernel] = f0
    return (u * fw) @ adjoint(u)


def fractional_power(a, alpha: float) -> SquareMatrix:
    return func_calculus(a, lambda t: np.power(t, alpha))


def spectral_parts(h, *, threshold: float = settings.KERNEL_THRESHOLD) -> tuple[SquareMatrix, SquareMatrix]:
    """Positive and negative parts h = h₊ − h₋ of a Hermitian matrix."""
    w, u = hermitian_eigh(h)
    w = np.where(kernel_mask(w, psd=False, threshold=threshold), 0.0, w)
    pos = (u * np.clip(w, 0.0, None)) @ adjoint(u)
    neg = (u * np.clip(-w, 0.0, None)) @ adjoint(u)
    return pos, neg


def singular_values(x) -> np.ndarray:
    return linalg.svdvals(as_square_matrix(x))


def schatten_norm(x, p: Exponent) -> float:
    """‖x‖_p = tr(|x|^p)^{1/p}; the largest singular value at p = ∞."""
    s = singular_values(x)
    p = PNorm.of(p)
    top = float(s[0])
    if top == 0.0:
        return 0.0
    if p.is_infinite:
        return top
    pv = p.value
    if pv == 1.0:
        return float(s.sum())
    return float(top * np.sum((s / top) ** pv) ** (1.0 / pv))


def trace_pair(x, y) -> complex:
    """tr(xy), the duality between L_p and L_p′."""
    x = as_square_matrix(x)
    y = as_square_matrix(y)
    require_same_dim(x, y)
    return complex(np.einsum("ij,ji->", x, y))


def duality_witness(x, p: Exponent) -> SquareMatrix:
    """y with ‖y‖_{p′} = 1 and tr(xy) = ‖x‖_p."""
    x = as_square_matrix(x)
    p = PNorm.of(p)
    norm = schatten_norm(x, p)
    if norm == 0.0:
        return np.zeros_like(x)
    if p.is_infinite:
        u, _, vh = linalg.svd(x)
        return np.outer(adjoint(vh)[:, 0], np.conj(u[:, 0]))
    w, modulus = linalg.polar(x, side="right")
    if p.exact == 1:
        return adjoint(w)
    pv = p.value
    power = func_calculus(modulus, lambda t: np.power(t, pv - 1.0))
    return power @ adjoint(w) / norm ** (pv - 1.0)
