"""LangGraph workflow for an experiment run."""

from typing import Literal

from langgraph.graph import END, START, StateGraph

from .experiment import ExperimentConfig
from .nodes import (
    collect_records,
    error_handler_node,
    execute_trials_node,
    flag_failures_node,
    plan_trials_node,
    summarize_node,
    write_report_node,
)
from .state import RunState, create_initial_state


def route_after_plan(state: RunState) -> Literal["execute", "error"]:
    """Route after planning based on success/failure."""
    if state.get("status") == "failed":
        return "error"
    return "execute"


def route_after_summary(state: RunState) -> Literal["flag_failures", "write_report"]:
    """Failing or erroring trials get reproduction files before the report is written."""
    summary = state.get("summary") or {}
    if summary.get("fail_count", 0) or summary.get("error_count", 0):
        return "flag_failures"
    return "write_report"


def build_run_graph():
    """Construct the run workflow."""

    graph_builder = StateGraph(RunState)

    # Add nodes
    graph_builder.add_node("plan", plan_trials_node)
    graph_builder.add_node("execute", execute_trials_node)
    graph_builder.add_node("summarize", summarize_node)
    graph_builder.add_node("flag_failures", flag_failures_node)
    graph_builder.add_node("write_report", write_report_node)
    graph_builder.add_node("error", error_handler_node)

    # Add edges
    graph_builder.add_edge(START, "plan")

    # Conditional edges
    graph_builder.add_conditional_edges(
        "plan",
        route_after_plan,
        {"execute": "execute", "error": "error"}
    )
    graph_builder.add_edge("execute", "summarize")
    graph_builder.add_conditional_edges(
        "summarize",
        route_after_summary,
        {"flag_failures": "flag_failures", "write_report": "write_report"}
    )
    graph_builder.add_edge("flag_failures", "write_report")

    # Terminal edges
    graph_builder.add_edge("write_report", END)
    graph_builder.add_edge("error", END)

    return graph_builder.compile()


# Create graph instance
run_graph = build_run_graph()


def run(config: ExperimentConfig) -> RunState:
    """Run a resolved configuration through the pipeline."""
    return run_graph.invoke(create_initial_state(config))


def records_of(state: RunState) -> list[dict]:
    """Report stream of a finished run (empty when it never started)."""
    if state.get("summary") is None:
        return []
    return collect_records(state)
