"""LLM access: request types, usage accounting, and pluggable backends."""

from foamagent.llm.client import LlmBackend, RetryPolicy, complete_chat
from foamagent.llm.http import HttpBackend
from foamagent.llm.mock import (
    MockBackend,
    ScriptEntry,
    fallback_token_count,
    load_script,
)
from foamagent.llm.types import (
    ChatMessage,
    ChatRequest,
    Completion,
    LlmParams,
    UsageRecord,
)
from foamagent.llm.usage import UsageLedger, estimate_cost

__all__ = [
    "LlmBackend",
    "RetryPolicy",
    "complete_chat",
    "HttpBackend",
    "MockBackend",
    "ScriptEntry",
    "fallback_token_count",
    "load_script",
    "ChatMessage",
    "ChatRequest",
    "Completion",
    "LlmParams",
    "UsageRecord",
    "UsageLedger",
    "estimate_cost",
]
