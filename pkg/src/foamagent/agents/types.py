"""Domain types produced and consumed by the agent actions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from foamagent.errors import DuplicateFile


@dataclass(frozen=True)
class Subtask:
    """One file-writing assignment from the architecture decomposition."""

    index: int
    file_name: str
    folder: str
    requirement_echo: str  # the full "to Write a OpenFoam ..." clause


@dataclass
class CaseArchitecture:
    """The planned case: standardized descriptors plus one subtask per file."""

    case_name: str
    case_domain: str
    case_category: str
    case_solver: str
    subtasks: list[Subtask] = field(default_factory=list)

    def __post_init__(self):
        self._check_unique(self.subtasks)

    @staticmethod
    def _check_unique(subtasks: list[Subtask]) -> None:
        seen: set[tuple[str, str]] = set()
        for st in subtasks:
            slot = (st.file_name, st.folder)
            if slot in seen:
                raise DuplicateFile(f"architecture lists {st.file_name} in {st.folder} twice")
            seen.add(slot)

    def file_names(self) -> list[str]:
        return [st.file_name for st in self.subtasks]

    def folders(self) -> list[str]:
        return [st.folder for st in self.subtasks]

    def has_file(self, file_name: str) -> bool:
        return any(st.file_name == file_name for st in self.subtasks)

    def folder_of(self, file_name: str) -> str | None:
        for st in self.subtasks:
            if st.file_name == file_name:
                return st.folder
        return None

    def merge(self, new_subtasks: list[Subtask]) -> list[Subtask]:
        """Adopt subtasks for files the architecture does not know yet.

        Existing (file, folder) slots are kept untouched; genuinely new
        ones are appended with fresh indices.  Returns what was added,
        which is exactly the set of files that still needs writing.
        """
        existing = {(st.file_name, st.folder) for st in self.subtasks}
        added: list[Subtask] = []
        next_index = len(self.subtasks) + 1
        for st in new_subtasks:
            if (st.file_name, st.folder) in existing:
                continue
            adopted = Subtask(next_index, st.file_name, st.folder, st.requirement_echo)
            self.subtasks.append(adopted)
            added.append(adopted)
            existing.add((st.file_name, st.folder))
            next_index += 1
        return added


class ReviewAction(enum.Enum):
    ARCHITECTURE_REVISION = "architecture_revision"
    CONTENT_REWRITE = "content_rewrite"


@dataclass(frozen=True)
class ReviewDecision:
    """What the reviewer concluded: revise the plan or rewrite files."""

    action: ReviewAction
    targets: tuple[tuple[str, str], ...]  # (file name, folder) pairs
    reason: str
