"""Triangular projection relative to a block spectrum, and operator-norm estimation."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from config import settings

from .density import BlockSpectrum
from .exceptions import InvalidParameter
from .matcore import Exponent, PNorm, SquareMatrix, as_square_matrix, require_same_dim, schatten_norm
from .randomgen import gaussian, trial_rng

logger = logging.getLogger(__name__)

LinearMap = Callable[[SquareMatrix], SquareMatrix]

# Keeps extra-start streams apart from the numbered trial streams.
_START_OFFSET = 1 << 31


@dataclass(frozen=True, eq=False)
class BlockMap:
    """x ↦ Σ_{k,j} m(k, j) e_k x e_j for a real symbol table m."""

    blocks: BlockSpectrum
    symbol: np.ndarray
    name: str = "block map"

    def __post_init__(self):
        table = np.asarray(self.symbol)
        if np.iscomplexobj(table):
            if np.abs(table.imag).max() > 0:
                raise InvalidParameter("symbol table must be real")
            table = table.real
        table = table.astype(float)
        if table.shape != (self.blocks.count, self.blocks.count):
            raise InvalidParameter(f"symbol table shape {table.shape} does not match {self.blocks.count} blocks")
        if not np.all(np.isfinite(table)):
            raise InvalidParameter("symbol table has non-finite entries")
        object.__setattr__(self, "symbol", table)

    def __call__(self, x: SquareMatrix) -> SquareMatrix:
        x = as_square_matrix(x)
        require_same_dim(x, self.blocks.basis)
        c = self.blocks.to_eigenbasis(x)
        return self.blocks.from_eigenbasis(self.blocks.expand(self.symbol) * c)

    def adjoint(self) -> "BlockMap":
        # Real symbols are self-adjoint for the pairing tr(x* y).
        return BlockMap(self.blocks, self.symbol, f"{self.name}*")

    def peak_unit(self) -> SquareMatrix:
        """Matrix unit at argmax |m|; the map scales it by exactly that entry in every L_p."""
        k, j = np.unravel_index(np.argmax(np.abs(self.symbol)), self.symbol.shape)
        return self.blocks.matrix_unit(k, j)

    @classmethod
    def identity(cls, blocks: BlockSpectrum) -> "BlockMap":
        return cls.scalar(blocks, 1.0)

    @classmethod
    def scalar(cls, blocks: BlockSpectrum, c: float) -> "BlockMap":
        return cls(blocks, np.full((blocks.count, blocks.count), float(c)), f"{c:g}*identity")

    @classmethod
    def triangular(cls, blocks: BlockSpectrum, part: str = "upper") -> "BlockMap":
        k = np.arange(blocks.count)
        if part == "upper":
            table = (k[:, None] <= k[None, :]).astype(float)
        elif part == "lower":
            table = (k[:, None] > k[None, :]).astype(float)
        else:
            raise InvalidParameter(f"part must be 'upper' or 'lower', got {part!r}")
        return cls(blocks, table, f"T_e[{part}]")

    @classmethod
    def from_table(cls, blocks: BlockSpectrum, table: np.ndarray, name: str = "block map") -> "BlockMap":
        return cls(blocks, np.asarray(table), name)


def triangular_project(x, blocks: BlockSpectrum) -> SquareMatrix:
    """T_e(x) = Σ_{i≤j} e_i x e_j."""
    return BlockMap.triangular(blocks, "upper")(x)


def triangular_complement(x, blocks: BlockSpectrum) -> SquareMatrix:
    """x − T_e(x)."""
    x = as_square_matrix(x)
    return x - triangular_project(x, blocks)


def _ratio(linear_map: LinearMap, x: SquareMatrix, p: PNorm) -> float:
    return schatten_norm(linear_map(x), p)


def _power_start(linear_map, x: SquareMatrix, iterations: int) -> SquareMatrix:
    adj = linear_map.adjoint()
    for _ in range(iterations):
        y = adj(linear_map(x))
        norm = np.linalg.norm(y)
        if norm == 0.0:
            break
        x = y / norm
    return x


def _ascend(linear_map: LinearMap, p: PNorm, x: SquareMatrix, rng: np.random.Generator, *,
            iterations: int, step: float, decay: float, patience: int) -> float:
    norm = schatten_norm(x, p)
    if norm == 0.0:
        return 0.0
    x = x / norm
    best = _ratio(linear_map, x, p)
    misses = 0
    for _ in range(iterations):
        g = gaussian(rng, x.shape[0])
        cand = x + step * g / schatten_norm(g, p)
        cand = cand / schatten_norm(cand, p)
        r = _ratio(linear_map, cand, p)
        if r > best:
            x, best, misses = cand, r, 0
            continue
        misses += 1
        if misses >= patience:
            step *= decay
            misses = 0
    return best


def operator_norm_estimate(linear_map: LinearMap, p: Exponent, dim: int, trials: int, seed: int, *,
                           starts: Iterable[SquareMatrix] = (),
                           iterations: int = settings.ASCENT_ITERATIONS,
                           step: float = settings.ASCENT_STEP,
                           decay: float = settings.ASCENT_DECAY,
                           patience: int = settings.ASCENT_PATIENCE,
                           jobs: int = 1) -> float:
    """Certified lower bound for the L_p → L_p norm of a linear map.

    Trial t starts from a Gaussian matrix drawn from stream (seed, t) and
    climbs by normalized random perturbations, accepting a step only when
    the ratio grows. At p = 2, maps exposing ``adjoint()`` get a power
    iteration warm start. A ``BlockMap`` also gets its peak matrix unit as a
    starting point, which makes the p = 2 estimate equal max |m| to roundoff. The
    result is the running max over trials and extra starts, so adding trials
    never lowers it.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    p = PNorm.of(p)
    warm = p.exact == 2 and hasattr(linear_map, "adjoint")
    options = dict(iterations=iterations, step=step, decay=decay, patience=patience)

    def run_trial(t: int) -> float:
        rng = trial_rng(seed, t)
        x = gaussian(rng, dim)
        if warm:
            x = _power_start(linear_map, x, settings.POWER_ITERATIONS)
        return _ascend(linear_map, p, x, rng, **options)

    def run_start(item) -> float:
        i, x = item
        return _ascend(linear_map, p, as_square_matrix(x), trial_rng(seed, _START_OFFSET + i), **options)

    starts = list(starts)
    if isinstance(linear_map, BlockMap):
        starts.append(linear_map.peak_unit())
    start_list = list(enumerate(starts))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_trial, range(trials))) + list(pool.map(run_start, start_list))
    else:
        results = [run_trial(t) for t in range(trials)] + [run_start(item) for item in start_list]
    best = max(results)
    logger.debug(f"norm estimate of {getattr(linear_map, 'name', 'map')} at p={p}: {best:.6g} "
                 f"({trials} trials, {len(start_list)} extra starts)")
    return best


def triangular_constants(blocks: BlockSpectrum, ps: Sequence[Exponent], trials: int, seed: int,
                         **options) -> dict[str, float]:
    """Observed lower bounds for ‖T_e‖_{p→p} across exponents."""
    t_e = BlockMap.triangular(blocks)
    return {
        str(PNorm.of(p)): operator_norm_estimate(t_e, p, blocks.dim, trials, seed, **options)
        for p in ps
    }
