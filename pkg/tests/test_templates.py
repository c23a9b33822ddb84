"""Prompt template loading, overrides, rendering, and log truncation."""

import pytest

from foamagent.agents.templates import (
    ERROR_BUDGET_CHARS,
    ERROR_HEAD_CHARS,
    ERROR_TAIL_CHARS,
    PLACEHOLDER_VOCABULARY,
    TEMPLATE_NAMES,
    load_all_templates,
    load_template,
    render_prompt,
    truncate_error,
)
from foamagent.errors import ConfigError, MissingBinding, UnknownPlaceholder

EXPECTED_PLACEHOLDERS = {
    "create_architecture": {"requirement", "tutorial"},
    "write_input_file": {"requirement", "tutorial_file"},
    "write_allrun": {"requirement", "tutorial", "file_list", "commands", "runlists"},
    "review_architecture": {"command", "error", "file_list", "folder_list"},
    "review_file_context": {
        "command",
        "error",
        "file_name",
        "file_folder",
        "file_list",
        "folder_list",
        "related_files",
    },
    "find_similar_query": {"requirement"},
}


def test_all_packaged_templates_load():
    templates = load_all_templates()
    assert set(templates) == set(TEMPLATE_NAMES)
    for name, template in templates.items():
        assert template.body.strip()
        assert template.placeholders == EXPECTED_PLACEHOLDERS[name]
        assert template.placeholders <= PLACEHOLDER_VOCABULARY


def test_unknown_template_name_is_rejected():
    with pytest.raises(ConfigError, match="unknown prompt template"):
        load_template("summon_mesh_goblin")


def test_override_directory_wins_per_file(tmp_path):
    (tmp_path / "find_similar_query.txt").write_text(
        "Describe {requirement} briefly.", encoding="utf-8"
    )
    custom = load_template("find_similar_query", override_dir=tmp_path)
    assert custom.body == "Describe {requirement} briefly."
    # untouched templates still come from the package
    stock = load_template("create_architecture", override_dir=tmp_path)
    assert stock.body == load_template("create_architecture").body


def test_override_with_unknown_placeholder_is_rejected(tmp_path):
    (tmp_path / "write_allrun.txt").write_text(
        "Run {requirement} with {warp_factor}.", encoding="utf-8"
    )
    with pytest.raises(UnknownPlaceholder, match="warp_factor"):
        load_template("write_allrun", override_dir=tmp_path)


def test_render_substitutes_all_placeholders():
    template = load_template("create_architecture")
    text = render_prompt(
        template,
        {"requirement": "simulate a cavity", "tutorial": "case name: cavity"},
    )
    assert "simulate a cavity" in text
    assert "case name: cavity" in text
    assert "{requirement}" not in text
    assert "{tutorial}" not in text


def test_render_ignores_extra_bindings():
    template = load_template("find_similar_query")
    text = render_prompt(
        template, {"requirement": "lid driven flow", "error": "unused"}
    )
    assert "lid driven flow" in text


def test_render_reports_missing_bindings():
    template = load_template("write_input_file")
    with pytest.raises(MissingBinding, match="tutorial_file"):
        render_prompt(template, {"requirement": "x"})


def test_render_never_expands_placeholder_shaped_values():
    # a value containing {error} must land verbatim, not recurse
    template = load_template("find_similar_query")
    text = render_prompt(template, {"requirement": "literal {error} marker"})
    assert "literal {error} marker" in text


def test_truncate_error_keeps_short_logs_verbatim():
    log = "FOAM FATAL ERROR: short"
    assert truncate_error(log) == log
    assert truncate_error("") == ""


def test_truncate_error_clips_head_and_tail():
    head = "H" * ERROR_HEAD_CHARS
    middle = "M" * 50_000
    tail = "T" * ERROR_TAIL_CHARS
    log = head + middle + tail
    clipped = truncate_error(log)
    assert len(clipped) < len(log)
    assert clipped.startswith(head)
    assert clipped.endswith(tail)
    assert "characters elided" in clipped
    # elision count is exact
    assert f"[{len(log) - ERROR_HEAD_CHARS - ERROR_TAIL_CHARS} characters elided]" in clipped


def test_truncate_error_boundary_is_exact():
    at_budget = "x" * ERROR_BUDGET_CHARS
    assert truncate_error(at_budget) == at_budget
    over = "x" * (ERROR_BUDGET_CHARS + 1)
    assert truncate_error(over) != over
