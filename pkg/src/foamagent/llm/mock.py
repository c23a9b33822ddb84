"""Scripted chat backend for offline, deterministic pipeline runs.

A script is an ordered list of replies.  Each entry may pin a substring
that must occur in the request text; a miss raises immediately rather
than skipping, so a drifting prompt fails loudly at the exact call that
changed.  Entries may also pin exact token usage; otherwise usage falls
back to the character-count rule (ceil(len/4)) on both sides.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from foamagent.errors import BackendScriptExhausted, ConfigError, ScriptMatchError
from foamagent.llm.types import ChatRequest, Completion, UsageRecord


def fallback_token_count(text: str) -> int:
    """Deterministic token estimate: one token per four characters."""
    return math.ceil(len(text) / 4)


@dataclass(frozen=True)
class ScriptEntry:
    reply: str
    match: str | None = None
    usage: UsageRecord | None = None


@dataclass
class MockBackend:
    """Replays a script, one entry per request, in order."""

    script: list[ScriptEntry]
    requests: list[ChatRequest] = field(default_factory=list)
    _cursor: int = 0

    def complete(self, request: ChatRequest) -> Completion:
        self.requests.append(request)
        if self._cursor >= len(self.script):
            raise BackendScriptExhausted(
                f"script has {len(self.script)} replies but a "
                f"{self._cursor + 1}th request arrived"
            )
        entry = self.script[self._cursor]
        self._cursor += 1
        text = request.joined_text()
        if entry.match is not None and entry.match not in text:
            raise ScriptMatchError(
                f"script entry {self._cursor} expects {entry.match!r} "
                f"in the request, which begins: {text[:200]!r}"
            )
        usage = entry.usage
        if usage is None:
            usage = UsageRecord(
                prompt_tokens=fallback_token_count(text),
                completion_tokens=fallback_token_count(entry.reply),
            )
        return Completion(text=entry.reply, usage=usage)

    @property
    def remaining(self) -> int:
        return len(self.script) - self._cursor


def load_script(path: str | Path) -> list[ScriptEntry]:
    """Read a script from a JSON file: a list of entry objects.

    Each object needs a "reply" and may carry "match" and
    "usage": {"prompt_tokens": int, "completion_tokens": int}.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read script {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigError(f"script {path} must be a JSON list of entries")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "reply" not in item:
            raise ConfigError(f"script {path} entry {i} lacks a 'reply'")
        usage = None
        if "usage" in item:
            usage = UsageRecord(
                prompt_tokens=int(item["usage"].get("prompt_tokens", 0)),
                completion_tokens=int(item["usage"].get("completion_tokens", 0)),
            )
        entries.append(
            ScriptEntry(reply=item["reply"], match=item.get("match"), usage=usage)
        )
    return entries
