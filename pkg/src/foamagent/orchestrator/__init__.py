"""Pipeline orchestration: the agent loop and its run transcript."""

from foamagent.orchestrator.pipeline import (
    PipelineConfig,
    RunOutcome,
    STOP_COMPLETED,
    STOP_EMPTY_REVIEW,
    STOP_INVALID_FILE,
    STOP_ITERATION_CAP,
    STOP_PARSE_FAILURE,
    STOP_RETRIEVAL_FAILURE,
    STOP_REVIEWER_DISABLED,
    STOP_TOKEN_BUDGET,
    budget_check,
    run_pipeline,
)
from foamagent.orchestrator.transcript import Transcript, TranscriptEntry, digest

__all__ = [
    "PipelineConfig",
    "RunOutcome",
    "STOP_COMPLETED",
    "STOP_EMPTY_REVIEW",
    "STOP_INVALID_FILE",
    "STOP_ITERATION_CAP",
    "STOP_PARSE_FAILURE",
    "STOP_RETRIEVAL_FAILURE",
    "STOP_REVIEWER_DISABLED",
    "STOP_TOKEN_BUDGET",
    "Transcript",
    "TranscriptEntry",
    "budget_check",
    "digest",
    "run_pipeline",
]
