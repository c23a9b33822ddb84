"""HTTP chat backend speaking the common chat-completions JSON shape."""

from __future__ import annotations

import logging

import httpx

from foamagent.errors import BackendError, TransportError
from foamagent.llm.types import ChatRequest, Completion, UsageRecord
from foamagent.llm.mock import fallback_token_count

logger = logging.getLogger(__name__)


class HttpBackend:
    """POSTs chat requests to a chat-completions-style endpoint.

    The endpoint is the full URL (for example
    ``https://api.example.com/v1/chat/completions``).  Connection
    problems, timeouts, and 5xx responses raise TransportError and are
    thus retryable; any other non-2xx response is a BackendError.

    Args:
        endpoint: Full URL of the completions route.
        api_key: Bearer token, sent as the Authorization header.
        timeout: Per-request timeout in seconds.
        client: Optional preconfigured httpx.Client (used by tests to
            inject a mock transport).
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str,
        timeout: float = 120.0,
        client: httpx.Client | None = None,
    ):
        self._endpoint = endpoint
        self._api_key = api_key
        self._client = client or httpx.Client(timeout=timeout)

    def complete(self, request: ChatRequest) -> Completion:
        payload = {
            "model": request.params.model_id,
            "messages": [{"role": m.role, "content": m.text} for m in request.messages],
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        try:
            response = self._client.post(self._endpoint, json=payload, headers=headers)
        except httpx.HTTPError as exc:
            raise TransportError(f"request to {self._endpoint} failed: {exc}") from exc
        if response.status_code >= 500:
            raise TransportError(
                f"{self._endpoint} answered {response.status_code}: {response.text[:200]}"
            )
        if response.status_code >= 300:
            raise BackendError(
                f"{self._endpoint} answered {response.status_code}: {response.text[:500]}"
            )
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion payload: {exc}") from exc
        usage = data.get("usage") or {}
        record = UsageRecord(
            prompt_tokens=int(usage.get("prompt_tokens", 0))
            or fallback_token_count(request.joined_text()),
            completion_tokens=int(usage.get("completion_tokens", 0))
            or fallback_token_count(text),
        )
        return Completion(text=text, usage=record)
