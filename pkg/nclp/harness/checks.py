"""Registry of the checks the harness can run.

Each entry draws its random inputs from the trial's own stream, calls a
checker or a construction, and returns the record together with the input
matrices (kept for reproduction files when the trial fails).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from ..density import Density
from ..embedding import balance_objective, balance_parameter, embed_u, reconstruct
from ..exceptions import ConfigInvalid, CornerNotAnnihilated
from ..inequalities import (
    check_araki_kosaki,
    check_commutative_bound,
    check_convexity_bound,
    check_derivative,
    check_diff_inequality,
    check_integral_identity,
    check_positive_split,
)
from ..matcore import PNorm, SquareMatrix, adjoint, schatten_norm
from ..randomgen import gaussian, psd, random_density, trial_rng, triangular_sample, unitary
from ..reports import CheckReport, make_report
from ..schur import (
    kernel_positivity_check,
    lambda_map,
    min_multiplier,
    min_symbol,
    qr_embed,
    qr_project,
    referee_cross_ratios,
    referee_project,
    resolvent_symbol,
    resolvent_weighted,
)
from ..spaces import ExponentSpec, check_discretization
from ..triangular import BlockMap, operator_norm_estimate
from .experiment import ExperimentConfig, Trial

Outcome = tuple[CheckReport, Mapping[str, SquareMatrix]]

INF = "inf"
REFEREE_PAIRS = ((0.0, 1.0), (1.0, 1.0), (0.3, 0.7))
DERIVATIVE_OFFSETS = (0.0, 0.5)
KERNEL_KMAX = 10_000
KERNEL_QUAD_POINTS = 64
BALANCE_GRID = np.logspace(-6, 6, 1000)
STABILITY_SAMPLES = 20
STABILITY_RESOLVENT = (1.0, 0.0)
STABILITY_GROWTH = {"min-multiplier": 1.01, "resolvent": 2.0, "qr": 2.0}


@dataclass(frozen=True)
class Check:
    name: str
    sample: Callable[[Trial, np.random.Generator], Outcome]
    summary: str
    axes: tuple = ()
    defaults: Mapping[str, tuple] = field(default_factory=dict)
    dims: tuple = (4,)
    trials: int = 100
    cond: Optional[float] = None
    uses_dims: bool = True
    fixed_trials: Optional[int] = None
    extra_validation: Optional[Callable[[ExperimentConfig], None]] = None

    def validate(self, config: ExperimentConfig):
        if self.extra_validation is not None:
            self.extra_validation(config)

    def run(self, trial: Trial) -> Outcome:
        return self.sample(trial, trial_rng(trial.seed, trial.trial))


# --- validators --------------------------------------------------------------

def _require(config: ExperimentConfig, axis: str, test: Callable, message: str):
    for value in getattr(config, axis):
        if not test(value):
            raise ConfigInvalid(axis, f"{message}, got {value}")


def _finite_at_least(low: float, *, strict: bool = False):
    def test(p):
        if p.is_infinite:
            return False
        return p.value > low if strict else p.value >= low
    return test


def _validate_diff(config):
    _require(config, "p", _finite_at_least(2), "p must be finite and >= 2")


def _validate_smooth(config):
    _require(config, "p", _finite_at_least(1, strict=True), "p must be finite and > 1")


def _validate_convexity(config):
    _require(config, "p", lambda p: not p.is_infinite and 2 <= p.value <= 3, "p must lie in [2, 3]")


def _validate_araki(config):
    _require(config, "eta", lambda e: 0 < e < 1, "eta must lie in (0, 1)")


def _validate_positive_split(config):
    _require(config, "p", lambda p: p.reciprocal <= 0.5, "p must be >= 2")
    _require(config, "t", lambda t: t > 0, "t must be positive")


def _validate_resolvent(config):
    _require(config, "eta", lambda e: 0 <= e <= 1, "eta must lie in [0, 1]")


def _validate_ordered(lower: str, upper: str, field_name: str):
    def validate(config):
        for lo in getattr(config, lower):
            for hi in getattr(config, upper):
                if lo.reciprocal <= hi.reciprocal:
                    raise ConfigInvalid(field_name, f"need {lower} < {upper}, got {lower}={lo}, {upper}={hi}")
    return validate


def _validate_qr(config):
    _validate_ordered("r", "p", "r")(config)
    if config.cond is not None and config.cond > 1e6:
        raise ConfigInvalid("cond", f"the projection identity is certified for condition <= 1e6, got {config.cond:g}")


def _validate_discretization(config):
    _validate_ordered("q", "p", "p")(config)
    _require(config, "eps", lambda e: e > 0, "eps must be positive")


def _validate_corners(config):
    _validate_ordered("q", "p", "p")(config)
    if min(config.dims) < 2:
        raise ConfigInvalid("dims", "a rank-deficient density needs dim >= 2")


def _validate_stability(config):
    if len(set(config.dims)) < 2:
        raise ConfigInvalid("dims", "need at least two distinct dimensions to compare")


# --- samplers ----------------------------------------------------------------

def _psd_pair(rng, dim) -> tuple[SquareMatrix, SquareMatrix]:
    a = psd(rng, dim)
    x = psd(rng, dim) * np.exp(rng.uniform(-2.0, 2.0))
    return a, x


def _shifted_pair(rng, dim) -> tuple[SquareMatrix, SquareMatrix]:
    a, x = _psd_pair(rng, dim)
    return a + 0.1 * np.eye(dim), x


def _density(trial: Trial, rng) -> Density:
    return random_density(rng, trial.dim, condition=trial.cond)


def _sample_diff(trial, rng):
    a, x = _psd_pair(rng, trial.dim)
    return check_diff_inequality(a, x, trial.get("p"), seed=trial.seed), {"a": a, "x": x}


def _sample_integral(trial, rng):
    a, x = _shifted_pair(rng, trial.dim)
    return check_integral_identity(a, x, trial.get("p"), seed=trial.seed), {"a": a, "x": x}


def _sample_convexity(trial, rng):
    a, x = _psd_pair(rng, trial.dim)
    return check_convexity_bound(a, x, trial.get("p"), seed=trial.seed), {"a": a, "x": x}


def _sample_commutative(trial, rng):
    u = unitary(rng, trial.dim)
    da = rng.uniform(0.0, 1.0, trial.dim)
    dx = rng.uniform(0.0, 1.0, trial.dim) * np.exp(rng.uniform(-2.0, 2.0))
    a = (u * da) @ adjoint(u)
    x = (u * dx) @ adjoint(u)
    return check_commutative_bound(a, x, trial.get("p"), seed=trial.seed), {"a": a, "x": x}


def _sample_araki(trial, rng):
    a, b = psd(rng, trial.dim), psd(rng, trial.dim)
    report = check_araki_kosaki(a, b, trial.get("q"), trial.get("eta"), seed=trial.seed)
    return report, {"a": a, "b": b}


def _sample_derivative(trial, rng):
    a, x = _shifted_pair(rng, trial.dim)
    s = DERIVATIVE_OFFSETS[trial.trial % len(DERIVATIVE_OFFSETS)]
    return check_derivative(a, x, trial.get("p"), s, seed=trial.seed), {"a": a, "x": x}


def _sample_positive_split(trial, rng):
    d = _density(trial, rng)
    x = gaussian(rng, trial.dim)
    report = check_positive_split(x, d, trial.get("p"), trial.get("t"), seed=trial.seed)
    return report, {"x": x, "d": d.matrix}


def _sample_kernel(trial, rng):
    return kernel_positivity_check(KERNEL_KMAX, KERNEL_QUAD_POINTS, seed=trial.seed), {}


def _sample_schur_half(trial, rng):
    d = _density(trial, rng)
    x = gaussian(rng, trial.dim)
    p = trial.get("p")
    rhs = 0.5 * schatten_norm(x, p)
    report = make_report(
        "schur-half",
        inputs=[x, d.matrix],
        lhs=schatten_norm(min_multiplier(x, d.blocks), p),
        rhs=rhs,
        tolerance=1e-9 * rhs,
        seed=trial.seed,
        params=[float(p)],
        notes=[f"blocks={d.blocks.count}"],
    )
    return report, {"x": x, "d": d.matrix}


def _sample_resolvent(trial, rng):
    d = _density(trial, rng)
    part = ("upper", "lower")[trial.trial % 2]
    x = triangular_sample(rng, d.blocks, part)
    beta = float(rng.uniform(0.25, 2.0))
    p, eta = trial.get("p"), trial.get("eta")
    rhs = 1.5 * schatten_norm(x, p)
    report = make_report(
        "resolvent-bound",
        inputs=[x, d.matrix],
        lhs=schatten_norm(resolvent_weighted(x, d.blocks, beta, eta), p),
        rhs=rhs,
        tolerance=1e-9 * rhs,
        seed=trial.seed,
        params=[float(p), eta, beta],
        notes=[f"part={part}"],
    )
    return report, {"x": x, "d": d.matrix}


def _sample_qr(trial, rng):
    d = _density(trial, rng)
    x = gaussian(rng, trial.dim)
    y = gaussian(rng, trial.dim)
    p, r = trial.get("p"), trial.get("r")
    back = qr_project(*qr_embed(x, d, p, r), d, p, r)
    relative = float(np.linalg.norm(back - x) / np.linalg.norm(x))
    annihilated = float(np.linalg.norm(qr_project(y, -y, d, p, r)))
    report = make_report(
        "qr-projection",
        inputs=[x, y, d.matrix],
        lhs=relative,
        rhs=1e-8,
        tolerance=0.0,
        seed=trial.seed,
        params=[float(p), float(r)],
        notes=[f"annihilated={annihilated:.3e}", f"condition={d.condition:.3e}"],
        side_ok=annihilated <= 1e-12,
        side_note="Q_r(y, -y) is not zero",
    )
    return report, {"x": x, "y": y, "d": d.matrix}


def _sample_lambda(trial, rng):
    d = _density(trial, rng)
    y = triangular_sample(rng, d.blocks)
    z = triangular_sample(rng, d.blocks)
    alpha = float(rng.uniform(0.1, 1.0))
    q = trial.get("q")
    rhs = 3.0 * max(schatten_norm(y, q), schatten_norm(z, q))
    diagonal = float(np.linalg.norm(lambda_map(y, y, d.blocks, alpha) - y) / np.linalg.norm(y))
    report = make_report(
        "lambda-map",
        inputs=[y, z, d.matrix],
        lhs=schatten_norm(lambda_map(y, z, d.blocks, alpha), q),
        rhs=rhs,
        tolerance=1e-9 * rhs,
        seed=trial.seed,
        params=[float(q), alpha],
        notes=[f"lambda(y,y)-y={diagonal:.3e}"],
        side_ok=diagonal <= 1e-10,
        side_note="lambda(y, y) differs from y",
    )
    return report, {"y": y, "z": z, "d": d.matrix}


def _sample_referee(trial, rng):
    d = _density(trial, rng)
    y = triangular_sample(rng, d.blocks)
    z = triangular_sample(rng, d.blocks)
    alpha0, alpha1 = REFEREE_PAIRS[trial.trial % len(REFEREE_PAIRS)]
    q = trial.get("q")
    ratios = referee_cross_ratios(y, z, d.blocks, alpha0, alpha1, q)
    worst = max(ratios, key=ratios.get)
    diagonal = float(np.linalg.norm(referee_project(y, y, d.blocks, alpha0, alpha1) - y) / np.linalg.norm(y))
    report = make_report(
        "referee-projection",
        inputs=[y, z, d.matrix],
        lhs=ratios[worst],
        rhs=1.5,
        tolerance=1.5e-9,
        seed=trial.seed,
        params=[float(q), alpha0, alpha1],
        notes=[f"worst={worst}", f"project(y,y)-y={diagonal:.3e}"],
        side_ok=diagonal <= 1e-10,
        side_note="referee_project(y, y) differs from y",
    )
    return report, {"y": y, "z": z, "d": d.matrix}


def _roundtrip_error(x, d, q, p) -> float:
    return float(np.linalg.norm(reconstruct(embed_u(x, d, q, p), d, q, p) - x) / np.linalg.norm(x))


def _sample_roundtrip(trial, rng):
    d = _density(trial, rng)
    x = gaussian(rng, trial.dim)
    q, p = trial.get("q"), trial.get("p")
    report = make_report(
        "embedding-roundtrip",
        inputs=[x, d.matrix],
        lhs=_roundtrip_error(x, d, q, p),
        rhs=1e-8,
        tolerance=0.0,
        seed=trial.seed,
        params=[float(q), float(p)],
        notes=[f"condition={d.condition:.3e}"],
    )
    return report, {"x": x, "d": d.matrix}


def _sample_corners(trial, rng):
    rank = int(rng.integers(1, trial.dim))
    d = random_density(rng, trial.dim, condition=trial.cond, rank=rank)
    x = gaussian(rng, trial.dim)
    kernel = d.kernel_basis
    outer = kernel @ (adjoint(kernel) @ x @ kernel) @ adjoint(kernel)
    allowed = x - outer
    q, p = trial.get("q"), trial.get("p")
    try:
        embed_u(x, d, q, p)
        rejected = False
    except CornerNotAnnihilated:
        rejected = True
    report = make_report(
        "embedding-corners",
        inputs=[x, d.matrix],
        lhs=_roundtrip_error(allowed, d, q, p),
        rhs=1e-8,
        tolerance=0.0,
        seed=trial.seed,
        params=[float(q), float(p)],
        notes=[f"rank={d.rank}"],
        side_ok=rejected,
        side_note="annihilated corner was not rejected",
    )
    return report, {"x": x, "d": d.matrix}


def _sample_balance(trial, rng):
    alpha, beta = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 2))
    q = float(rng.uniform(2.0, 6.0))
    p = q + float(rng.uniform(0.25, 6.0))
    closed = balance_parameter(alpha, beta, p, q)
    grid_min = min(balance_objective(t, alpha, beta, p, q) for t in BALANCE_GRID)
    report = make_report(
        "balance-parameter",
        inputs=[np.array([alpha, beta, p, q])],
        lhs=closed.value,
        rhs=grid_min,
        tolerance=1e-6 * grid_min,
        seed=trial.seed,
        params=[p, q, float(alpha), float(beta)],
        notes=[f"t_star={closed.t_star:.12g}"],
    )
    return report, {}


def _sample_discretization(trial, rng):
    d = _density(trial, rng)
    x = gaussian(rng, trial.dim)
    spec = ExponentSpec.of(trial.get("p"), trial.get("q"))
    return check_discretization(x, d, spec, trial.get("eps"), seed=trial.seed), {"x": x, "d": d.matrix}


def _min_multiplier_norm(rng, d: Density, p) -> float:
    m = BlockMap.from_table(d.blocks, min_symbol().table(d.blocks), "min multiplier")
    seed = int(rng.integers(0, 2 ** 31))
    return operator_norm_estimate(m, p, d.dim, 2, seed, starts=[np.eye(d.dim)], iterations=60)


def _resolvent_sup_ratio(rng, d: Density, p) -> float:
    # Lower part at eta = 0 holds the entries d_i/(d_i + d_j) close to one.
    blocks = d.blocks
    lower = BlockMap.triangular(blocks, "lower").symbol
    table = resolvent_symbol(*STABILITY_RESOLVENT).table(blocks) * lower
    inputs = [triangular_sample(rng, blocks, "lower") for _ in range(STABILITY_SAMPLES)]
    if lower.any():
        inputs.append(BlockMap.from_table(blocks, table).peak_unit())
    return max(schatten_norm(resolvent_weighted(x, blocks, *STABILITY_RESOLVENT), p) / schatten_norm(x, p)
               for x in inputs)


def _qr_sup_ratio(rng, d: Density, p, r) -> float:
    """max(‖d^α x‖_r, ‖x d^α‖_r) / max(‖y‖_r, ‖z‖_r) for x = Q_r(y, z)."""
    pairs = [(gaussian(rng, d.dim), gaussian(rng, d.dim)) for _ in range(STABILITY_SAMPLES)]
    pairs.append(qr_embed(np.eye(d.dim), d, p, r))
    ratios = []
    for y, z in pairs:
        back = qr_embed(qr_project(y, z, d, p, r), d, p, r)
        ratios.append(max(schatten_norm(v, r) for v in back) / max(schatten_norm(y, r), schatten_norm(z, r)))
    return max(ratios)


def _stability_ratios(rng, dim, p, cond) -> tuple[dict[str, float], Density]:
    d = random_density(rng, dim, condition=cond)
    ratios = {
        "min-multiplier": _min_multiplier_norm(rng, d, p),
        "resolvent": _resolvent_sup_ratio(rng, d, p),
    }
    if p.reciprocal < 1:
        ratios["qr"] = _qr_sup_ratio(rng, d, p, PNorm.of(2 / (1 + p.reciprocal)))
    return ratios, d


def _sample_stability(trial, rng):
    small, large = min(trial.dims), max(trial.dims)
    p = trial.get("p")
    low, d_small = _stability_ratios(rng, small, p, trial.cond)
    high, d_large = _stability_ratios(rng, large, p, trial.cond)
    growth = {name: high[name] / low[name] for name in low}
    worst = max(growth, key=lambda name: growth[name] / STABILITY_GROWTH[name])
    report = make_report(
        "dimension-stability",
        inputs=[d_small.matrix, d_large.matrix],
        lhs=growth[worst] / STABILITY_GROWTH[worst],
        rhs=1.0,
        tolerance=1e-9,
        seed=trial.seed,
        params=[float(p), float(small), float(large)],
        notes=[f"{name}: n={small} {low[name]:.9g}, n={large} {high[name]:.9g}" for name in low]
        + [f"worst={worst}"],
    )
    return report, {"d_small": d_small.matrix, "d_large": d_large.matrix}


CHECKS: dict[str, Check] = {c.name: c for c in (
    Check("diff-inequality", _sample_diff, "‖a+x‖_p^p − ‖a‖_p^p against p 2^{p−1} max{…}",
          axes=("p",), defaults={"p": (2, 2.5, 3, 4, 6)}, dims=(4, 6, 8), trials=700,
          extra_validation=_validate_diff),
    Check("diff-integral", _sample_integral, "increment against p ∫ tr((a+sx)^{p−1}x) ds",
          axes=("p",), defaults={"p": (2, 2.5, 3, 4)}, dims=(4, 8), trials=200,
          extra_validation=_validate_smooth),
    Check("convexity-bound", _sample_convexity, "operator convexity bound for 2 ≤ p ≤ 3",
          axes=("p",), defaults={"p": (2, 2.5, 3)}, dims=(4, 8), trials=1000,
          extra_validation=_validate_convexity),
    Check("commutative-bound", _sample_commutative, "(2^p − 1) bound for commuting inputs",
          axes=("p",), defaults={"p": (2, 3, 4)}, dims=(4, 8), trials=1000,
          extra_validation=_validate_diff),
    Check("araki-kosaki", _sample_araki, "‖a^η b^η‖_{q/η} ≤ ‖ab‖_q^η",
          axes=("q", "eta"), defaults={"q": (1, 2, 4), "eta": tuple(k / 10 for k in range(1, 10))},
          dims=(4,), trials=400, extra_validation=_validate_araki),
    Check("derivative", _sample_derivative, "central difference of tr((a+sx)^p)",
          axes=("p",), defaults={"p": (2.5, 3, 4)}, dims=(6,), trials=1000,
          extra_validation=_validate_smooth),
    Check("positive-split", _sample_positive_split, "‖x_k‖_{p,t,d} ≤ ‖x‖_{p,t,d}",
          axes=("p", "t"), defaults={"p": (2, 3, 4), "t": (0.1, 1, 10)}, dims=(4,), trials=1000,
          cond=1e3, extra_validation=_validate_positive_split),
    Check("kernel-positivity", _sample_kernel, "positive definiteness of 1/(1+e^{|x|})",
          uses_dims=False, fixed_trials=1),
    Check("schur-half", _sample_schur_half, "‖M_a x‖_p ≤ ‖x‖_p / 2",
          axes=("p",), defaults={"p": (1, 1.5, 2, 3, INF)}, dims=(2, 4, 8, 16), trials=1000, cond=1e3),
    Check("resolvent-bound", _sample_resolvent, "3/2 bound on triangular parts",
          axes=("p", "eta"), defaults={"p": (1, 1.5, 2, 3, INF), "eta": (0, 0.25, 0.5, 0.75, 1)},
          dims=(2, 4, 8, 16), trials=100, cond=1e3, extra_validation=_validate_resolvent),
    Check("qr-projection", _sample_qr, "Q_r inverts the canonical embedding",
          axes=("p", "r"), defaults={"p": (2, INF), "r": (1, 1.5)}, dims=(4, 8), trials=500,
          cond=1e6, extra_validation=_validate_qr),
    Check("lambda-map", _sample_lambda, "Λ(x, x) = x and ‖Λ(y, z)‖_q ≤ 3 max",
          axes=("q",), defaults={"q": (1, 2, INF)}, dims=(4, 8), trials=500, cond=1e3),
    Check("referee-projection", _sample_referee, "one-sided cross estimates ≤ 3/2",
          axes=("q",), defaults={"q": (1, 2, INF)}, dims=(4, 8), trials=500, cond=1e3),
    Check("embedding-roundtrip", _sample_roundtrip, "d^α u(x) + u(x) d^α = x",
          axes=("q", "p"), defaults={"q": (1, 1.2), "p": (1.5, 1.8)}, dims=(4, 8), trials=500,
          cond=1e4, extra_validation=_validate_ordered("q", "p", "p")),
    Check("embedding-corners", _sample_corners, "three corners reconstruct, the fourth is rejected",
          axes=("q", "p"), defaults={"q": (1,), "p": (1.5,)}, dims=(4, 8), trials=200,
          cond=1e4, extra_validation=_validate_corners),
    Check("balance-parameter", _sample_balance, "closed-form balance against a log grid",
          uses_dims=False, trials=100),
    Check("discretization", _sample_discretization, "Δ norms under the grid discretization",
          axes=("p", "q", "eps"), defaults={"p": (2, INF), "q": (1,), "eps": (0.1, 0.01)},
          dims=(4, 8), trials=200, cond=1e3, extra_validation=_validate_discretization),
    Check("dimension-stability", _sample_stability, "min multiplier, resolvent and Q_r ratios across dims",
          axes=("p",), defaults={"p": (1, 2, INF)}, dims=(2, 16), trials=10, cond=1e3,
          uses_dims=False, extra_validation=_validate_stability),
)}


def get_check(name: str) -> Check:
    return CHECKS[name]
