"""State definitions for the experiment run graph."""

from operator import add
from typing import Annotated, List, Optional, TypedDict

from .experiment import ExperimentConfig, Trial


class RunSummary(TypedDict):
    """Trailing record of a report stream."""

    record: str
    check_name: str
    seed: int
    trials: int
    pass_count: int
    fail_count: int
    error_count: int
    max_violation: float


class RunState(TypedDict):
    """Complete state for one experiment run."""

    # Input fields
    config: ExperimentConfig

    # Processing fields
    plan: List[Trial]
    outcomes: list
    summary: Optional[RunSummary]
    repro_files: Annotated[List[str], add]

    # Output fields
    status: str
    error_message: Optional[str]
    audit_notes: Annotated[List[str], add]

    # Metadata
    started_at: Optional[float]
    wall_time: Optional[float]


def create_initial_state(config: ExperimentConfig) -> RunState:
    """Create the initial state for a run."""
    import time

    return RunState(
        config=config,
        plan=[],
        outcomes=[],
        summary=None,
        repro_files=[],
        status="pending",
        error_message=None,
        audit_notes=[],
        started_at=time.perf_counter(),
        wall_time=None,
    )
