"""Reply grammars: property-based round-trips plus malformed inputs.

The round-trip suites run at least 1000 generated instances each; the
strategies draw file names, folders, and requirement tails from the
shapes real replies take.
"""

import pytest
from hypothesis import given, settings, strategies as st

from foamagent.agents.parsing import (
    extract_fenced_block,
    fence,
    parse_case_fields,
    parse_review_targets,
    parse_subtask_list,
    serialize_review_targets,
    serialize_subtask_list,
    subtask_echo,
)
from foamagent.agents.types import Subtask
from foamagent.errors import (
    ArityMismatch,
    CountMismatch,
    MalformedSubtaskLine,
    MissingFileMarkers,
    NoFence,
    NoHeader,
    UnterminatedFence,
)

file_names = st.from_regex(r"[A-Za-z][A-Za-z0-9_.]{0,20}", fullmatch=True)
folders = st.sampled_from(["0", "system", "constant", "0.orig"])
requirements = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
    min_size=1,
    max_size=80,
).map(lambda s: " ".join(s.split()) or "simulate something")


@st.composite
def subtask_lists(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    requirement = draw(requirements)
    subtasks = []
    for i in range(n):
        fname = draw(file_names)
        folder = draw(folders)
        subtasks.append(
            Subtask(i + 1, fname, folder, subtask_echo(fname, folder, requirement))
        )
    return subtasks


@settings(max_examples=1000, deadline=None)
@given(subtask_lists())
def test_subtask_list_round_trip(subtasks):
    text = serialize_subtask_list(subtasks)
    parsed = parse_subtask_list(text)
    assert [(s.file_name, s.folder) for s in parsed] == [
        (s.file_name, s.folder) for s in subtasks
    ]
    # indices are renumbered sequentially by the serializer
    assert [s.index for s in parsed] == list(range(1, len(subtasks) + 1))


@settings(max_examples=1000, deadline=None)
@given(subtask_lists())
def test_subtask_list_survives_fencing_and_chatter(subtasks):
    text = "Sure, here is the plan.\n" + fence(serialize_subtask_list(subtasks))
    parsed = parse_subtask_list(text)
    assert len(parsed) == len(subtasks)


@settings(max_examples=1000, deadline=None)
@given(
    st.text(
        alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="`"),
        max_size=300,
    )
)
def test_fenced_block_round_trip(content):
    assert extract_fenced_block(fence(content)) == content
    assert extract_fenced_block(fence(content, tag="python")) == content


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.tuples(file_names, folders), min_size=1, max_size=8))
def test_review_targets_round_trip(targets):
    assert parse_review_targets(serialize_review_targets(targets)) == targets


def test_subtask_grammar_matches_paper_shape():
    reply = (
        "splits into 2 subtasks:\n"
        "subtask1: to Write a OpenFoam blockMeshDict foamfile in system folder "
        "that could be used to meet user requirement:do a cavity case.\n"
        "subtask2: to Write a OpenFoam U foamfile in 0 folder "
        "that could be used to meet user requirement:do a cavity case.\n"
    )
    parsed = parse_subtask_list(reply)
    assert [(s.file_name, s.folder) for s in parsed] == [
        ("blockMeshDict", "system"),
        ("U", "0"),
    ]


def test_subtask_list_errors():
    with pytest.raises(NoHeader):
        parse_subtask_list("no header here")
    with pytest.raises(CountMismatch):
        parse_subtask_list(
            "splits into 2 subtasks:\n"
            "subtask1: to Write a OpenFoam U foamfile in 0 folder x.\n"
        )
    with pytest.raises(MalformedSubtaskLine):
        parse_subtask_list(
            "splits into 1 subtasks:\n"
            "subtask1: write U somewhere\n"
        )


def test_blank_lines_are_skipped_and_trailing_prose_stops_parsing():
    reply = (
        "splits into 1 subtask:\n"
        "\n"
        "subtask1: to Write a OpenFoam U foamfile in 0 folder x.\n"
        "Hope this helps!\n"
    )
    assert len(parse_subtask_list(reply)) == 1


def test_fence_errors():
    with pytest.raises(NoFence):
        extract_fenced_block("no fence at all")
    with pytest.raises(UnterminatedFence):
        extract_fenced_block("```\nstill open")


def test_review_target_errors():
    with pytest.raises(MissingFileMarkers):
        parse_review_targets("no markers")
    with pytest.raises(ArityMismatch):
        parse_review_targets("###a, b### in ``system``")


def test_case_fields_first_occurrence_wins():
    text = "case name: cavity\ncase name: other\ncase solver: pisoFoam\n"
    fields = parse_case_fields(text)
    assert fields["name"] == "cavity"
    assert fields["solver"] == "pisoFoam"
    assert "domain" not in fields
