"""Usage ledger arithmetic and the flat-rate cost estimate."""

import pytest

from foamagent.errors import InvalidInput, InvalidRequest
from foamagent.llm.types import UsageRecord
from foamagent.llm.usage import UsageLedger, estimate_cost


def test_usage_record_totals():
    record = UsageRecord(prompt_tokens=120, completion_tokens=30)
    assert record.total_tokens == 150
    summed = record + UsageRecord(prompt_tokens=10, completion_tokens=5)
    assert summed.prompt_tokens == 130
    assert summed.completion_tokens == 35


def test_usage_record_rejects_negative_counts():
    with pytest.raises(InvalidRequest):
        UsageRecord(prompt_tokens=-1)
    with pytest.raises(InvalidRequest):
        UsageRecord(completion_tokens=-3)


def test_ledger_accumulates_per_label_and_total():
    ledger = UsageLedger()
    ledger.record("architect", UsageRecord(prompt_tokens=100, completion_tokens=20))
    ledger.record("writer:U", UsageRecord(prompt_tokens=50, completion_tokens=10))
    ledger.record("architect", UsageRecord(prompt_tokens=5, completion_tokens=1))

    by_label = ledger.by_label()
    assert by_label["architect"] == UsageRecord(prompt_tokens=105, completion_tokens=21)
    assert by_label["writer:U"] == UsageRecord(prompt_tokens=50, completion_tokens=10)
    assert ledger.total == UsageRecord(prompt_tokens=155, completion_tokens=31)
    assert ledger.total_tokens == 186

    # the total always equals the sum over labels
    label_sum = sum((u for u in by_label.values()), UsageRecord())
    assert label_sum == ledger.total


def test_ledger_as_dict_is_sorted_and_complete():
    ledger = UsageLedger()
    ledger.record("zeta", UsageRecord(prompt_tokens=1, completion_tokens=1))
    ledger.record("alpha", UsageRecord(prompt_tokens=2, completion_tokens=2))
    snapshot = ledger.as_dict()
    assert list(snapshot["by_label"]) == ["alpha", "zeta"]
    assert snapshot["total_tokens"] == 6
    assert snapshot["prompt_tokens"] == 3
    assert snapshot["completion_tokens"] == 3


def test_empty_ledger_is_zero():
    ledger = UsageLedger()
    assert ledger.total_tokens == 0
    assert ledger.by_label() == {}


def test_estimate_cost_flat_rate():
    assert estimate_cost(44045, 5.0) == pytest.approx(0.220225, abs=1e-9)
    assert estimate_cost(0, 5.0) == 0.0
    assert estimate_cost(1_000_000, 2.5) == pytest.approx(2.5)


def test_estimate_cost_rejects_negative_inputs():
    with pytest.raises(InvalidInput):
        estimate_cost(-1, 5.0)
    with pytest.raises(InvalidInput):
        estimate_cost(100, -0.01)
