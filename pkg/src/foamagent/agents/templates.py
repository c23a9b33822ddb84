"""Prompt templates: data files with {name} placeholders.

Templates live as plain text under ``agents/prompts/`` so prompt wording
can be audited and swapped without touching code; a config-supplied
override directory takes precedence per file.  Rendering is a single
substitution pass, so placeholder-shaped text inside binding values is
inserted verbatim and never re-expanded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from foamagent.errors import ConfigError, MissingBinding, UnknownPlaceholder

TEMPLATE_NAMES = (
    "create_architecture",
    "write_input_file",
    "write_allrun",
    "review_architecture",
    "review_file_context",
    "find_similar_query",
)

# Every placeholder any template may use.  A template mentioning a name
# outside this set is rejected at load time, which catches typos in
# override files before they silently render as literal braces.
PLACEHOLDER_VOCABULARY = frozenset(
    {
        "requirement",
        "tutorial",
        "tutorial_file",
        "file_list",
        "folder_list",
        "commands",
        "runlists",
        "error",
        "command",
        "file_name",
        "file_folder",
        "related_files",
    }
)

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

# Error-log truncation: long solver logs keep their head (the setup
# banner) and a larger tail (where the failure is reported).
ERROR_BUDGET_CHARS = 8000
ERROR_HEAD_CHARS = 2000
ERROR_TAIL_CHARS = 6000


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    placeholders: frozenset[str]


def load_template(name: str, override_dir: str | Path | None = None) -> PromptTemplate:
    """Load a template by name, preferring the override directory.

    Raises:
        ConfigError: Unknown template name or unreadable file.
        UnknownPlaceholder: The body names a placeholder outside the
            known vocabulary.
    """
    if name not in TEMPLATE_NAMES:
        raise ConfigError(f"unknown prompt template {name!r}; known: {TEMPLATE_NAMES}")
    body: str | None = None
    if override_dir is not None:
        candidate = Path(override_dir) / f"{name}.txt"
        if candidate.is_file():
            body = candidate.read_text(encoding="utf-8")
    if body is None:
        try:
            body = (resources.files("foamagent") / "agents" / "prompts" / f"{name}.txt").read_text(
                encoding="utf-8"
            )
        except (FileNotFoundError, OSError) as exc:
            raise ConfigError(f"cannot read packaged template {name}: {exc}") from exc
    found = frozenset(_PLACEHOLDER_RE.findall(body))
    unknown = found - PLACEHOLDER_VOCABULARY
    if unknown:
        raise UnknownPlaceholder(
            f"template {name} uses unknown placeholders: {sorted(unknown)}"
        )
    return PromptTemplate(name=name, body=body, placeholders=found)


def load_all_templates(override_dir: str | Path | None = None) -> dict[str, PromptTemplate]:
    return {name: load_template(name, override_dir) for name in TEMPLATE_NAMES}


def render_prompt(template: PromptTemplate, bindings: Mapping[str, str]) -> str:
    """Substitute every placeholder in the template body.

    Extra bindings are allowed and ignored; missing ones are an error.
    The output is the template text itself with values spliced in; no
    other rewriting happens.

    Raises:
        MissingBinding: A placeholder in the body has no binding.
    """
    missing = sorted(template.placeholders - set(bindings))
    if missing:
        raise MissingBinding(f"template {template.name} is missing bindings for: {missing}")

    def _sub(match: re.Match) -> str:
        name = match.group(1)
        if name in bindings:
            return str(bindings[name])
        return match.group(0)  # not a known placeholder; leave the text alone

    return _PLACEHOLDER_RE.sub(_sub, template.body)


def truncate_error(text: str, budget: int = ERROR_BUDGET_CHARS) -> str:
    """Clip an error log to the prompt budget, keeping head and tail."""
    if len(text) <= budget:
        return text
    elided = len(text) - ERROR_HEAD_CHARS - ERROR_TAIL_CHARS
    return (
        text[:ERROR_HEAD_CHARS]
        + f"\n... [{elided} characters elided] ...\n"
        + text[-ERROR_TAIL_CHARS:]
    )
