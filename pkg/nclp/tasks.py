"""Trial execution: one wrapper per trial and a process pool for batches."""

from __future__ import annotations

import logging
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Mapping, NamedTuple, Optional

from config import settings

from .exceptions import IllConditioned
from .harness.checks import get_check
from .harness.experiment import Trial
from .matcore import SquareMatrix
from .reports import retolerance

logger = logging.getLogger(__name__)


class TrialOutcome(NamedTuple):
    trial: int
    record: dict
    inputs: Mapping[str, SquareMatrix]


def error_record(trial: Trial, exc: BaseException) -> dict:
    return {
        "check_name": trial.check_name,
        "trial": trial.trial,
        "verdict": "error",
        "error_type": type(exc).__name__,
        "message": str(exc),
        "seed": trial.seed,
        "p_q_params": [float(v) for _, v in trial.point],
    }


def run_trial(trial: Trial, tol: Optional[float] = None) -> TrialOutcome:
    """Run one trial; exceptions become error records, never propagate."""
    check = get_check(trial.check_name)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IllConditioned)
            report, inputs = check.run(trial)
        report["trial"] = trial.trial
        report["notes"].extend(f"ill-conditioned: {w.message}" for w in caught
                               if issubclass(w.category, IllConditioned))
        if tol is not None:
            report = retolerance(report, tol)
        if report["verdict"] == "fail":
            logger.warning(f"{trial.check_name} trial {trial.trial} failed: "
                           f"lhs={report['lhs']:.12g} rhs={report['rhs']:.12g}")
            return TrialOutcome(trial.trial, dict(report), dict(inputs))
        return TrialOutcome(trial.trial, dict(report), {})
    except Exception as e:
        logger.error(f"{trial.check_name} trial {trial.trial} raised: {e}")
        logger.error(traceback.format_exc())
        return TrialOutcome(trial.trial, error_record(trial, e), {})


def _run_with_tol(args) -> TrialOutcome:
    trial, tol = args
    return run_trial(trial, tol)


def run_batch(plan: list[Trial], *, jobs: int = 1, tol: Optional[float] = None) -> list[TrialOutcome]:
    """Run every planned trial; results come back ordered by trial index."""
    logger.info(f"running {len(plan)} trials on {jobs} worker(s)")
    if jobs <= 1 or len(plan) <= 1:
        outcomes = [run_trial(t, tol) for t in plan]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_with_tol, [(t, tol) for t in plan],
                                     chunksize=settings.WORKER_CHUNKSIZE))
    return sorted(outcomes, key=lambda o: o.trial)
