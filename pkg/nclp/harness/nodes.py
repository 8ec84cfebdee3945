"""Node functions for the experiment run graph."""

import logging
import time
from typing import Any, Dict

from ..exceptions import NclpError
from ..reports import violation
from ..serializers import write_records, write_repro
from ..tasks import run_batch
from .experiment import plan_trials
from .state import RunState, RunSummary

logger = logging.getLogger(__name__)


# Node 1: Plan
def plan_trials_node(state: RunState) -> Dict[str, Any]:
    """Expand the configuration into an ordered list of trials."""
    config = state["config"]
    try:
        plan = plan_trials(config)
    except NclpError as e:
        return {
            "status": "failed",
            "error_message": str(e),
            "audit_notes": [f"ERROR planning trials: {e}"],
        }
    return {
        "plan": plan,
        "status": "running",
        "audit_notes": [f"Planned {len(plan)} trials of {config.check_name} (seed {config.seed})"],
    }


# Node 2: Execute
def execute_trials_node(state: RunState) -> Dict[str, Any]:
    """Run every trial, in a worker pool when more than one job is allowed."""
    config = state["config"]
    outcomes = run_batch(state["plan"], jobs=config.jobs, tol=config.tol)
    return {
        "outcomes": outcomes,
        "audit_notes": [f"Executed {len(outcomes)} trials on {config.jobs} worker(s)"],
    }


# Node 3: Summarize
def summarize_node(state: RunState) -> Dict[str, Any]:
    """Count verdicts and find the largest violation."""
    config = state["config"]
    records = [o.record for o in state["outcomes"]]
    judged = [r for r in records if r["verdict"] in ("pass", "fail")]
    summary = RunSummary(
        record="summary",
        check_name=config.check_name,
        seed=config.seed,
        trials=len(records),
        pass_count=sum(r["verdict"] == "pass" for r in records),
        fail_count=sum(r["verdict"] == "fail" for r in records),
        error_count=sum(r["verdict"] == "error" for r in records),
        max_violation=max((violation(r) for r in judged), default=0.0),
    )
    logger.info(f"{config.check_name}: {summary['pass_count']} passed, {summary['fail_count']} failed, "
                f"{summary['error_count']} errors, max violation {summary['max_violation']:.3e}")
    return {
        "summary": summary,
        "audit_notes": [
            f"Summary: {summary['pass_count']} pass / {summary['fail_count']} fail / "
            f"{summary['error_count']} error",
        ],
    }


# Node 4: Flag failures
def flag_failures_node(state: RunState) -> Dict[str, Any]:
    """Write a reproduction file for every failing trial."""
    config = state["config"]
    failing = [o for o in state["outcomes"] if o.record["verdict"] != "pass"]
    written = []
    if config.out:
        for outcome in failing:
            if outcome.record["verdict"] == "fail":
                path = write_repro(config.out, outcome.record, outcome.inputs)
                logger.warning(f"reproduction file written: {path}")
                written.append(str(path))
    return {
        "status": "failed",
        "repro_files": written,
        "audit_notes": [
            f"FAILURES: {len(failing)} trial(s) did not pass",
            *[f"  - trial {o.record['trial']}: {o.record['verdict']}"
              + (f" ({o.record['message']})" if o.record["verdict"] == "error" else "")
              for o in failing[:20]],
        ],
    }


def collect_records(state: RunState) -> list[dict]:
    """Trial records in trial order, then the summary record."""
    summary = dict(state["summary"])
    if state["config"].timing and state.get("wall_time") is not None:
        summary["wall_time"] = state["wall_time"]
    return [o.record for o in state["outcomes"]] + [summary]


# Node 5: Write report
def write_report_node(state: RunState) -> Dict[str, Any]:
    """Emit the report stream and record completion."""
    config = state["config"]
    elapsed = time.perf_counter() - state["started_at"] if state.get("started_at") else None
    status = "completed" if state["status"] != "failed" else "failed"
    update: Dict[str, Any] = {"wall_time": elapsed, "status": status}
    notes = ["RUN COMPLETE" if status == "completed" else "RUN FINISHED WITH FAILURES"]
    if elapsed is not None:
        logger.info(f"{config.check_name} finished in {elapsed:.2f}s")
    if config.out:
        try:
            write_records(config.out, collect_records({**state, **update}), config.fmt)
        except NclpError as e:
            return {
                "status": "failed",
                "error_message": str(e),
                "audit_notes": [f"ERROR writing report: {e}"],
            }
        notes.append(f"Report: {config.out} ({config.fmt})")
    return {**update, "audit_notes": notes}


# Node 6: Error Handler
def error_handler_node(state: RunState) -> Dict[str, Any]:
    """Handle a run that could not start."""
    error = state.get("error_message") or "Unknown error"
    logger.error(f"run aborted: {error}")
    return {
        "status": "failed",
        "audit_notes": [
            "RUN FAILED",
            f"Error: {error}",
        ],
    }
