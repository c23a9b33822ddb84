"""Reviewer routing: plan revision versus in-place content rewrites."""

import pytest

from foamagent.agents.review import (
    DEFAULT_MISSING_FILE_PATTERNS,
    compile_missing_file_patterns,
    decide_review_action,
)
from foamagent.agents.types import CaseArchitecture, ReviewAction, Subtask
from foamagent.errors import EmptyTargets


def _arch(*files):
    subtasks = [
        Subtask(i + 1, name, folder, f"write {name}") for i, (name, folder) in enumerate(files)
    ]
    return CaseArchitecture(
        case_name="cavity",
        case_domain="incompressible",
        case_category="laminar",
        case_solver="icoFoam",
        subtasks=subtasks,
    )


ARCH = _arch(("controlDict", "system"), ("U", "0"), ("blockMeshDict", "system"))


def test_known_files_with_content_error_get_rewritten():
    decision = decide_review_action(
        targets=[("U", "0")],
        architecture=ARCH,
        error_text="FOAM FATAL ERROR: divergence in U residual",
    )
    assert decision.action is ReviewAction.CONTENT_REWRITE
    assert decision.targets == (("U", "0"),)


def test_unknown_file_forces_architecture_revision():
    decision = decide_review_action(
        targets=[("p", "0")],
        architecture=ARCH,
        error_text="FOAM FATAL ERROR: solver blew up",
    )
    assert decision.action is ReviewAction.ARCHITECTURE_REVISION
    assert "p" in decision.reason


@pytest.mark.parametrize(
    "error_text",
    [
        'cannot find file "0/p"',
        "CANNOT FIND FILE 0/p",
        "sh: No such file or directory",
        "the file 0/epsilon does not exist in the case",
        "FILE constant/g DOES NOT EXIST",
    ],
)
def test_missing_file_error_forces_revision_even_for_known_targets(error_text):
    decision = decide_review_action(
        targets=[("U", "0")], architecture=ARCH, error_text=error_text
    )
    assert decision.action is ReviewAction.ARCHITECTURE_REVISION


def test_missing_file_signal_alone_carries_an_empty_target_revision():
    decision = decide_review_action(
        targets=[], architecture=ARCH, error_text='cannot find file "0/p"'
    )
    assert decision.action is ReviewAction.ARCHITECTURE_REVISION
    assert decision.targets == ()


def test_no_targets_and_no_signal_is_unactionable():
    with pytest.raises(EmptyTargets):
        decide_review_action(targets=[], architecture=ARCH, error_text="Floating point exception")


def test_divergence_text_does_not_trip_missing_file_patterns():
    decision = decide_review_action(
        targets=[("fvSolution", "system")],
        architecture=_arch(("fvSolution", "system")),
        error_text="Floating point exception (core dumped)\nFOAM FATAL ERROR",
    )
    assert decision.action is ReviewAction.CONTENT_REWRITE


def test_custom_patterns_replace_the_defaults():
    patterns = compile_missing_file_patterns([r"gone missing"])
    decision = decide_review_action(
        targets=[("U", "0")],
        architecture=ARCH,
        # would match a default pattern, but the custom set ignores it
        error_text="cannot find file 0/U",
        patterns=patterns,
    )
    assert decision.action is ReviewAction.CONTENT_REWRITE
    revision = decide_review_action(
        targets=[("U", "0")],
        architecture=ARCH,
        error_text="field U has GONE MISSING",
        patterns=patterns,
    )
    assert revision.action is ReviewAction.ARCHITECTURE_REVISION


def test_default_pattern_set_is_exactly_three_shapes():
    assert DEFAULT_MISSING_FILE_PATTERNS == (
        r"cannot find file",
        r"No such file",
        r"file .* does not exist",
    )


# --- architecture merge ------------------------------------------------------


def test_merge_appends_only_new_slots_with_fresh_indices():
    arch = _arch(("controlDict", "system"), ("U", "0"))
    added = arch.merge(
        [
            Subtask(1, "controlDict", "system", "dup, kept as-is"),
            Subtask(2, "p", "0", "write p"),
        ]
    )
    assert [st.file_name for st in added] == ["p"]
    assert added[0].index == 3
    assert arch.file_names() == ["controlDict", "U", "p"]
    # the original echo of the kept slot is untouched
    assert arch.subtasks[0].requirement_echo == "write controlDict"


def test_merge_of_all_known_slots_adds_nothing():
    arch = _arch(("controlDict", "system"),)
    assert arch.merge([Subtask(1, "controlDict", "system", "x")]) == []
    assert len(arch.subtasks) == 1


def test_architecture_rejects_duplicate_slots():
    from foamagent.errors import DuplicateFile

    with pytest.raises(DuplicateFile):
        _arch(("U", "0"), ("U", "0"))


def test_folder_lookup():
    assert ARCH.folder_of("controlDict") == "system"
    assert ARCH.folder_of("missing") is None
    assert ARCH.has_file("U") and not ARCH.has_file("T")
