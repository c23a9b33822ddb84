"""Benchmark metrics: pass@k, productivity, and correlation.

pass@k uses the unbiased estimator computed in product form, which
stays exact for any n up to a few thousand without touching large
binomials.  Productivity is mean token usage per mean line of generated
case input.
"""

from __future__ import annotations

import math

from foamagent.errors import (
    ConstantSeries,
    InvalidInput,
    LengthMismatch,
    ZeroLines,
)


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that at least one of k samples passes, given c of n did.

    Computed as ``1 - prod_{i=n-c+1..n} (1 - k/i)``, the numerically
    stable rewrite of ``1 - C(n-c, k) / C(n, k)``.

    Raises:
        InvalidInput: n < 1, k < 1, k > n, or c outside [0, n].
    """
    if n < 1:
        raise InvalidInput(f"need at least one sample, got n={n}")
    if k < 1 or k > n:
        raise InvalidInput(f"k must be in [1, n={n}], got k={k}")
    if c < 0 or c > n:
        raise InvalidInput(f"pass count must be in [0, n={n}], got c={c}")
    if c == 0:
        return 0.0
    if n - c < k:
        # Every size-k draw contains at least one passing sample.
        return 1.0
    product = 1.0
    for i in range(n - c + 1, n + 1):
        product *= 1.0 - k / i
    return 1.0 - product


def productivity(mean_tokens: float, mean_lines: float) -> float:
    """Tokens spent per generated line of case input (lower is better).

    Raises:
        InvalidInput: Negative token count.
        ZeroLines: No generated lines to divide by.
    """
    if mean_tokens < 0:
        raise InvalidInput(f"token usage cannot be negative, got {mean_tokens}")
    if mean_lines <= 0:
        raise ZeroLines(f"mean generated lines must be positive, got {mean_lines}")
    return mean_tokens / mean_lines


def pearson_r(xs: list[float], ys: list[float]) -> float:
    """Pearson correlation coefficient of two equal-length series.

    Raises:
        LengthMismatch: Different lengths, or fewer than two points.
        ConstantSeries: Either series has zero variance.
    """
    if len(xs) != len(ys):
        raise LengthMismatch(f"series lengths differ: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise LengthMismatch(f"need at least two points, got {len(xs)}")
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    ss_x = sum(d * d for d in dx)
    ss_y = sum(d * d for d in dy)
    if ss_x == 0.0 or ss_y == 0.0:
        raise ConstantSeries("correlation is undefined for a constant series")
    cov = sum(a * b for a, b in zip(dx, dy))
    return cov / math.sqrt(ss_x * ss_y)
