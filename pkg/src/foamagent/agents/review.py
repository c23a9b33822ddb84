"""The reviewer's routing rule: revise the plan or rewrite file content."""

from __future__ import annotations

import re
from typing import Sequence

from foamagent.agents.types import CaseArchitecture, ReviewAction, ReviewDecision
from foamagent.errors import EmptyTargets

# Error shapes that mean a required file simply is not there.  Matched
# case-insensitively: solvers lowercase the phrase, shells capitalize it.
DEFAULT_MISSING_FILE_PATTERNS = (
    r"cannot find file",
    r"No such file",
    r"file .* does not exist",
)


def compile_missing_file_patterns(
    patterns: Sequence[str] = DEFAULT_MISSING_FILE_PATTERNS,
) -> tuple[re.Pattern, ...]:
    return tuple(re.compile(p, re.IGNORECASE) for p in patterns)


def decide_review_action(
    targets: Sequence[tuple[str, str]],
    architecture: CaseArchitecture,
    error_text: str,
    patterns: Sequence[re.Pattern] | None = None,
) -> ReviewDecision:
    """Route a failure to an architecture revision or a content rewrite.

    An architecture revision is chosen when the reviewer names a file
    the architecture does not contain, or when the error text matches a
    missing-file pattern; in both cases the plan itself is wrong.
    Otherwise the named files get rewritten in place.  Pure function:
    nothing here mutates the architecture.

    Raises:
        EmptyTargets: No files named and no missing-file signal, so
            there is nothing actionable in the review.
    """
    compiled = patterns if patterns is not None else compile_missing_file_patterns()
    missing_signal = next((p.pattern for p in compiled if p.search(error_text)), None)
    if not targets and missing_signal is None:
        raise EmptyTargets("review names no files and the error shows no missing file")

    absent = [name for name, _ in targets if not architecture.has_file(name)]
    if absent:
        return ReviewDecision(
            action=ReviewAction.ARCHITECTURE_REVISION,
            targets=tuple(targets),
            reason=f"review names files outside the architecture: {absent}",
        )
    if missing_signal is not None:
        return ReviewDecision(
            action=ReviewAction.ARCHITECTURE_REVISION,
            targets=tuple(targets),
            reason=f"error indicates a missing file (pattern {missing_signal!r})",
        )
    return ReviewDecision(
        action=ReviewAction.CONTENT_REWRITE,
        targets=tuple(targets),
        reason="named files exist; their content is at fault",
    )
