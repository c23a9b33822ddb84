"""The append-only action log every pipeline run produces.

Each entry records who did what at which iteration, digests of the
prompt and reply (content stays out of the log; digests make identical
runs byte-comparable), and the token usage of the call.  Non-LLM events
(retrievals, executions, parse failures) appear with zero usage, so the
ledger total always equals the sum over transcript entries.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from foamagent.errors import ConfigError
from foamagent.llm.types import UsageRecord

DIGEST_CHARS = 16


def digest(text: str) -> str:
    """Short stable content digest for transcript entries."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:DIGEST_CHARS]


@dataclass(frozen=True)
class TranscriptEntry:
    index: int
    role: str
    action: str
    iteration: int
    prompt_digest: str
    reply_digest: str
    prompt_tokens: int
    completion_tokens: int
    detail: dict | None = None

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "role": self.role,
            "action": self.action,
            "iteration": self.iteration,
            "prompt_digest": self.prompt_digest,
            "reply_digest": self.reply_digest,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "detail": self.detail,
        }


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)

    def record(
        self,
        role: str,
        action: str,
        iteration: int,
        prompt_text: str,
        reply_text: str,
        usage: UsageRecord | None = None,
        detail: dict | None = None,
    ) -> TranscriptEntry:
        usage = usage or UsageRecord()
        entry = TranscriptEntry(
            index=len(self.entries),
            role=role,
            action=action,
            iteration=iteration,
            prompt_digest=digest(prompt_text),
            reply_digest=digest(reply_text),
            prompt_tokens=usage.prompt_tokens,
            completion_tokens=usage.completion_tokens,
            detail=detail,
        )
        self.entries.append(entry)
        return entry

    def total_usage(self) -> UsageRecord:
        total = UsageRecord()
        for entry in self.entries:
            total = total + UsageRecord(entry.prompt_tokens, entry.completion_tokens)
        return total

    def llm_calls(self) -> list[TranscriptEntry]:
        """Entries that are actual backend calls (they carry usage)."""
        return [e for e in self.entries if e.prompt_tokens or e.completion_tokens]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.as_dict(), sort_keys=True) + "\n" for e in self.entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        transcript = cls()
        for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                transcript.entries.append(
                    TranscriptEntry(
                        index=int(data["index"]),
                        role=data["role"],
                        action=data["action"],
                        iteration=int(data["iteration"]),
                        prompt_digest=data["prompt_digest"],
                        reply_digest=data["reply_digest"],
                        prompt_tokens=int(data["prompt_tokens"]),
                        completion_tokens=int(data["completion_tokens"]),
                        detail=data.get("detail"),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ConfigError(f"{path}:{line_no}: bad transcript line: {exc}") from exc
        return transcript
