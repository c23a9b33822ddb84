"""The one entry point every agent action uses to talk to a backend."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable, Protocol

from foamagent.errors import TransportError
from foamagent.llm.types import ChatRequest, Completion

logger = logging.getLogger(__name__)


class LlmBackend(Protocol):
    def complete(self, request: ChatRequest) -> Completion: ...


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff for transient transport failures only.

    ``max_retries`` counts retries after the initial attempt; delays
    double from ``base_delay``: 1 s, 2 s, 4 s by default.
    """

    max_retries: int = 3
    base_delay: float = 1.0


def complete_chat(
    request: ChatRequest,
    backend: LlmBackend,
    retry: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> Completion:
    """Send one chat request, retrying transport failures with backoff.

    The request is never mutated; every attempt sends the same request.
    Well-formed error replies (bad request, parse-shaped backend errors)
    are not retried, only TransportError is.

    Raises:
        TransportError: All attempts failed with transport errors.
    """
    attempts = retry.max_retries + 1
    for attempt in range(attempts):
        try:
            return backend.complete(request)
        except TransportError as exc:
            if attempt == attempts - 1:
                raise
            delay = retry.base_delay * (2**attempt)
            logger.warning(
                "transport failure (attempt %d/%d), retrying in %.0fs: %s",
                attempt + 1,
                attempts,
                delay,
                exc,
            )
            sleep(delay)
    raise AssertionError("unreachable")
