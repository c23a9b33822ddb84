"""Agent roles' building blocks: templates, reply parsers, review routing."""

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
from foamagent.agents.review import (
    DEFAULT_MISSING_FILE_PATTERNS,
    compile_missing_file_patterns,
    decide_review_action,
)
from foamagent.agents.templates import (
    PLACEHOLDER_VOCABULARY,
    TEMPLATE_NAMES,
    PromptTemplate,
    load_all_templates,
    load_template,
    render_prompt,
    truncate_error,
)
from foamagent.agents.types import (
    CaseArchitecture,
    ReviewAction,
    ReviewDecision,
    Subtask,
)

__all__ = [
    "extract_fenced_block",
    "fence",
    "parse_case_fields",
    "parse_review_targets",
    "parse_subtask_list",
    "serialize_review_targets",
    "serialize_subtask_list",
    "subtask_echo",
    "DEFAULT_MISSING_FILE_PATTERNS",
    "compile_missing_file_patterns",
    "decide_review_action",
    "PLACEHOLDER_VOCABULARY",
    "TEMPLATE_NAMES",
    "PromptTemplate",
    "load_all_templates",
    "load_template",
    "render_prompt",
    "truncate_error",
    "CaseArchitecture",
    "ReviewAction",
    "ReviewDecision",
    "Subtask",
]
