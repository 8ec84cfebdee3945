"""CheckReport records shared by the checkers and the run harness."""

from __future__ import annotations

import hashlib
from typing import List, Optional, Sequence, TypedDict

import numpy as np

SIDE_FAILURE = "side criterion failed"


class CheckReport(TypedDict):
    """One trial of one inequality or identity check."""

    check_name: str
    trial: Optional[int]
    inputs_digest: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    verdict: str
    seed: int
    p_q_params: List[float]
    notes: List[str]


def inputs_digest(inputs: Sequence[np.ndarray]) -> str:
    """sha256 over shapes and little-endian complex128 bytes of every input."""
    h = hashlib.sha256()
    for arr in inputs:
        arr = np.ascontiguousarray(np.asarray(arr, dtype="<c16"))
        h.update(repr(arr.shape).encode())
        h.update(arr.tobytes())
    return h.hexdigest()[:16]


def _passes(slack: float, tolerance: float, notes: Sequence[str]) -> bool:
    return slack >= -tolerance and not any(n.startswith(SIDE_FAILURE) for n in notes)


def make_report(check_name: str, *, inputs: Sequence[np.ndarray], lhs: float, rhs: float,
                tolerance: float, seed: int, params: Sequence[float],
                notes: Sequence[str] = (), side_ok: bool = True, side_note: str = "") -> CheckReport:
    """Build a record; pass iff ``slack >= -tolerance`` and every side criterion held.

    A failed side criterion is kept as a note, so re-judging the record under
    another tolerance (see ``retolerance``) keeps it failed.
    """
    lhs = float(lhs)
    rhs = float(rhs)
    slack = rhs - lhs
    notes = list(notes)
    if not side_ok:
        notes.append(f"{SIDE_FAILURE}: {side_note}" if side_note else SIDE_FAILURE)
    return CheckReport(
        check_name=check_name,
        trial=None,
        inputs_digest=inputs_digest(inputs),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tolerance=float(tolerance),
        verdict="pass" if _passes(slack, tolerance, notes) else "fail",
        seed=int(seed),
        p_q_params=[float(v) for v in params],
        notes=notes,
    )


def retolerance(report: CheckReport, tolerance: float) -> CheckReport:
    """Copy of the record judged against another slack tolerance."""
    updated = CheckReport(**report)
    updated["tolerance"] = float(tolerance)
    updated["verdict"] = "pass" if _passes(report["slack"], tolerance, report["notes"]) else "fail"
    return updated


def violation(report: CheckReport) -> float:
    """How far a record is past its bound (0 when it passes with room)."""
    return max(0.0, -report["slack"])
