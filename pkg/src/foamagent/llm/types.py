"""Chat request and completion types shared by all LLM backends."""

from __future__ import annotations

from dataclasses import dataclass, field

from foamagent.errors import InvalidRequest


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    text: str


@dataclass(frozen=True)
class LlmParams:
    """Sampling parameters; low temperature is the pipeline default."""

    model_id: str
    temperature: float = 0.01
    max_output_tokens: int = 4096

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 1.0:
            raise InvalidRequest(f"temperature must be in [0, 1], got {self.temperature}")
        if self.max_output_tokens < 1:
            raise InvalidRequest("max_output_tokens must be positive")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    params: LlmParams

    def __post_init__(self):
        if not self.messages:
            raise InvalidRequest("a chat request needs at least one message")
        if self.messages[-1].role != "user":
            raise InvalidRequest("the final message must come from the user")

    @classmethod
    def user(cls, text: str, params: LlmParams) -> "ChatRequest":
        """The common one-shot request: a single user message."""
        return cls(messages=(ChatMessage("user", text),), params=params)

    def joined_text(self) -> str:
        """All message texts joined by newlines.

        This is the canonical request text: scripted backends match
        against it and the fallback token estimate measures it.
        """
        return "\n".join(m.text for m in self.messages)


@dataclass(frozen=True)
class UsageRecord:
    """Token counts for one completed call."""

    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise InvalidRequest("token counts cannot be negative")

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def __add__(self, other: "UsageRecord") -> "UsageRecord":
        return UsageRecord(
            self.prompt_tokens + other.prompt_tokens,
            self.completion_tokens + other.completion_tokens,
        )


@dataclass(frozen=True)
class Completion:
    """A backend reply plus the usage it cost."""

    text: str
    usage: UsageRecord = field(default_factory=UsageRecord)
