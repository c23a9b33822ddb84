"""Aggregating per-run outcomes into the benchmark report.

A report row summarizes one benchmark case over its n runs; the
Average row takes the column means over cases, and pass@k aggregates
as the mean of the per-case estimates.  Reports carry no wall-clock
fields, so two reports over identical runs serialize byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from foamagent.errors import (
    ConstantSeries,
    InconsistentN,
    InvalidInput,
    LengthMismatch,
    ZeroLines,
)
from foamagent.evaluation.metrics import pass_at_k, pearson_r, productivity
from foamagent.llm.usage import estimate_cost

ROUND_DIGITS = 4


@dataclass(frozen=True)
class CaseMetrics:
    """One benchmark case summarized over its n runs."""

    label: str
    n: int
    c: int  # runs that passed, i.e. scored 4
    mean_executability: float
    mean_tokens: float
    mean_iterations: float
    mean_lines: float


def case_metrics(label: str, outcomes: Sequence[Mapping]) -> CaseMetrics:
    """Fold run outcome summaries (``RunOutcome.as_dict()``) into one row.

    Raises:
        InvalidInput: No outcomes were given.
    """
    if not outcomes:
        raise InvalidInput(f"case {label!r} has no run outcomes")
    n = len(outcomes)
    return CaseMetrics(
        label=label,
        n=n,
        c=sum(1 for o in outcomes if o["passed"]),
        mean_executability=sum(o["score"] for o in outcomes) / n,
        mean_tokens=sum(o["total_tokens"] for o in outcomes) / n,
        mean_iterations=sum(o["iterations"] for o in outcomes) / n,
        mean_lines=sum(o["total_lines"] for o in outcomes) / n,
    )


def _row_productivity(row: CaseMetrics) -> float | None:
    """Productivity, or None when a case generated no lines at all
    (every run aborted before writing anything)."""
    try:
        return productivity(row.mean_tokens, row.mean_lines)
    except ZeroLines:
        return None


def _mean(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return sum(present) / len(present)


def _rounded(value: float | None) -> float | None:
    return None if value is None else round(value, ROUND_DIGITS)


def aggregate_report(
    cases: Sequence[CaseMetrics],
    k: int = 1,
    price_per_million_tokens: float | None = None,
) -> dict:
    """Build the benchmark report over all case rows.

    Raises:
        InvalidInput: No cases.
        InconsistentN: Cases were run with different n.
    """
    if not cases:
        raise InvalidInput("report needs at least one case")
    ns = {row.n for row in cases}
    if len(ns) > 1:
        raise InconsistentN(f"cases were run with different n: {sorted(ns)}")
    n = ns.pop()

    rows = []
    for row in cases:
        rows.append(
            {
                "label": row.label,
                "n": row.n,
                "c": row.c,
                "executability": _rounded(row.mean_executability),
                "token_usage": _rounded(row.mean_tokens),
                "iterations": _rounded(row.mean_iterations),
                "productivity": _rounded(_row_productivity(row)),
                "pass_at_k_percent": _rounded(100.0 * pass_at_k(row.n, row.c, k)),
            }
        )

    average = {
        "executability": _rounded(_mean([r["executability"] for r in rows])),
        "token_usage": _rounded(_mean([r["token_usage"] for r in rows])),
        "iterations": _rounded(_mean([r["iterations"] for r in rows])),
        "productivity": _rounded(_mean([r["productivity"] for r in rows])),
        "pass_at_k_percent": _rounded(_mean([r["pass_at_k_percent"] for r in rows])),
    }

    try:
        correlation = _rounded(
            pearson_r(
                [row.mean_iterations for row in cases],
                [row.mean_tokens for row in cases],
            )
        )
    except (LengthMismatch, ConstantSeries):
        correlation = None

    cost = None
    if price_per_million_tokens is not None and average["token_usage"] is not None:
        cost = _rounded(estimate_cost(average["token_usage"], price_per_million_tokens))

    return {
        "n": n,
        "k": k,
        "cases": rows,
        "average": average,
        "correlation_iterations_tokens": correlation,
        "price_per_million_tokens": price_per_million_tokens,
        "estimated_cost_usd": cost,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


_COLUMNS = (
    ("executability", "Executability", 1),
    ("token_usage", "Tokens", 0),
    ("iterations", "Iterations", 1),
    ("productivity", "Productivity", 1),
)


def _fmt(value: float | None, decimals: int) -> str:
    if value is None:
        return "-"
    return f"{value:.{decimals}f}"


def report_text(report: dict) -> str:
    """The report as an aligned text table, one case per line."""
    pass_header = f"Pass@{report['k']}(%)"
    header = ["Case"] + [title for _, title, _ in _COLUMNS] + [pass_header]
    lines = [header]
    for row in report["cases"]:
        lines.append(
            [row["label"]]
            + [_fmt(row[key], decimals) for key, _, decimals in _COLUMNS]
            + [_fmt(row["pass_at_k_percent"], 1)]
        )
    avg = report["average"]
    lines.append(
        ["Average"]
        + [_fmt(avg[key], decimals) for key, _, decimals in _COLUMNS]
        + [_fmt(avg["pass_at_k_percent"], 1)]
    )

    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    rendered = []
    for line in lines:
        first = line[0].ljust(widths[0])
        rest = "  ".join(cell.rjust(widths[i + 1]) for i, cell in enumerate(line[1:]))
        rendered.append(f"{first}  {rest}".rstrip())

    extras = []
    if report["correlation_iterations_tokens"] is not None:
        extras.append(
            f"correlation(iterations, tokens) = {report['correlation_iterations_tokens']:.2f}"
        )
    if report["estimated_cost_usd"] is not None:
        extras.append(
            f"estimated cost per case = ${report['estimated_cost_usd']:.2f} "
            f"(at ${report['price_per_million_tokens']}/1M tokens)"
        )
    if extras:
        rendered.append("")
        rendered.extend(extras)
    return "\n".join(rendered) + "\n"
