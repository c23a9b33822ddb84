"""Token accounting: the per-run ledger and the cost estimate."""

from __future__ import annotations

from foamagent.errors import InvalidInput
from foamagent.llm.types import UsageRecord


class UsageLedger:
    """Accumulates usage per labelled action and in total.

    Totals are plain sums, so they are independent of recording order
    and always equal the sum over the per-label breakdown.
    """

    def __init__(self):
        self._by_label: dict[str, UsageRecord] = {}
        self._total = UsageRecord()

    def record(self, label: str, usage: UsageRecord) -> None:
        self._by_label[label] = self._by_label.get(label, UsageRecord()) + usage
        self._total = self._total + usage

    @property
    def total(self) -> UsageRecord:
        return self._total

    @property
    def total_tokens(self) -> int:
        return self._total.total_tokens

    def by_label(self) -> dict[str, UsageRecord]:
        return dict(self._by_label)

    def as_dict(self) -> dict:
        return {
            "prompt_tokens": self._total.prompt_tokens,
            "completion_tokens": self._total.completion_tokens,
            "total_tokens": self._total.total_tokens,
            "by_label": {
                label: {
                    "prompt_tokens": u.prompt_tokens,
                    "completion_tokens": u.completion_tokens,
                }
                for label, u in sorted(self._by_label.items())
            },
        }


def estimate_cost(total_tokens: int | float, price_per_million: float) -> float:
    """Dollar cost of a token count at a flat price per million tokens.

    Raises:
        InvalidInput: Negative tokens or price.
    """
    if total_tokens < 0:
        raise InvalidInput(f"token count cannot be negative, got {total_tokens}")
    if price_per_million < 0:
        raise InvalidInput(f"price cannot be negative, got {price_per_million}")
    return total_tokens * price_per_million / 1_000_000
