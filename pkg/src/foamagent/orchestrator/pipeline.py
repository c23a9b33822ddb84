"""The agent loop: requirement in, executability-scored case out.

One run proceeds as:

  1. (RAG on) rephrase the requirement into a structured query, retrieve
     the most similar tutorial architecture.
  2. Architect decomposes the requirement into per-file subtasks.
  3. InputWriter writes each input file, each with its own tutorial file
     chunk when retrieval is enabled.
  4. Runner writes the Allrun script against the command whitelists and
     the case is executed.
  5. While the run scores below "ran to completion" and budget remains:
     Reviewer inspects the failure, picks revision or rewrite, the
     InputWriter applies it, and the case is re-executed.

Iteration 0 is the initial write-and-run; each review/rewrite/re-run
cycle increments the iteration counter by one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from foamagent.agents.parsing import (
    extract_fenced_block,
    parse_case_fields,
    parse_review_targets,
    parse_subtask_list,
)
from foamagent.agents.review import decide_review_action
from foamagent.agents.templates import load_template, render_prompt, truncate_error
from foamagent.agents.types import CaseArchitecture, ReviewAction, ReviewDecision, Subtask
from foamagent.errors import (
    ConfigError,
    DuplicateFile,
    EmbedderMismatch,
    EmptyIndex,
    EmptyTargets,
    EmptyText,
    IoFailure,
    ReplyParseError,
)
from foamagent.executor.rubric import (
    Executability,
    RequirementCheck,
    SignalRules,
    classify_executability,
    evaluate_requirement_checks,
    scan_log_signals,
)
from foamagent.executor.run import ExecutionBackend, ExecutionReport, execute_allrun
from foamagent.llm.client import LlmBackend, RetryPolicy, complete_chat
from foamagent.llm.types import ChatRequest, LlmParams
from foamagent.llm.usage import UsageLedger
from foamagent.orchestrator.transcript import Transcript
from foamagent.rag.chunks import ChunkKind, TutorialChunk
from foamagent.rag.embedding import Embedder, HashedTokenEmbedder
from foamagent.rag.index import RetrievalIndex, retrieve_similar
from foamagent.workspace import (
    CaseWorkspace,
    CodeStats,
    FoamFile,
    collect_code_stats,
    default_command_whitelist,
    default_run_whitelist,
    materialize_case,
    run_root,
    validate_allrun_script,
)

_RETRIEVAL_ERRORS = (EmptyIndex, EmbedderMismatch, EmptyText)

ROLE_ARCHITECT = "architect"
ROLE_INPUT_WRITER = "input_writer"
ROLE_RUNNER = "runner"
ROLE_REVIEWER = "reviewer"

STOP_COMPLETED = "completed"
STOP_ITERATION_CAP = "iteration-cap"
STOP_TOKEN_BUDGET = "token-budget"
STOP_REVIEWER_DISABLED = "reviewer-disabled"
STOP_PARSE_FAILURE = "parse-failure"
STOP_EMPTY_REVIEW = "empty-review"
STOP_RETRIEVAL_FAILURE = "retrieval-failure"
STOP_INVALID_FILE = "invalid-file"

REASK_NOTE = (
    "\n\nYour previous reply could not be used: {error}\n"
    "Reply again in exactly the required format, with NO other texts."
)


@dataclass
class PipelineConfig:
    model_id: str = "default-model"
    temperature: float = 0.01
    max_output_tokens: int = 4096
    max_iterations: int = 20
    token_budget: int | None = None
    top_k: int = 1
    enable_rag: bool = True
    enable_reviewer: bool = True
    enable_review_architecture: bool = True
    exec_timeout: float = 600.0
    prompt_dir: str | Path | None = None
    command_whitelist: frozenset[str] | None = None
    run_whitelist: frozenset[str] | None = None

    def params(self) -> LlmParams:
        return LlmParams(
            model_id=self.model_id,
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
        )


@dataclass
class RunOutcome:
    requirement: str
    case_name: str
    executability: Executability
    iterations: int
    stop_reason: str
    succeeded: bool
    workspace: CaseWorkspace
    ledger: UsageLedger
    transcript: Transcript
    code_stats: CodeStats
    wall_time_seconds: float

    @property
    def passed(self) -> bool:
        return self.executability.score == 4

    def as_dict(self) -> dict:
        """Deterministic summary; wall time stays out so identical runs
        compare equal on this payload."""
        return {
            "case_name": self.case_name,
            "score": self.executability.score,
            "rationale": self.executability.rationale,
            "requirement_checks": [
                [check_id, passed] for check_id, passed in self.executability.requirement_checks
            ],
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "succeeded": self.succeeded,
            "passed": self.passed,
            "prompt_tokens": self.ledger.total.prompt_tokens,
            "completion_tokens": self.ledger.total.completion_tokens,
            "total_tokens": self.ledger.total.total_tokens,
            "file_count": self.code_stats.file_count,
            "total_lines": self.code_stats.total_lines,
            "lines_per_file": self.code_stats.lines_per_file,
        }


class _Abort(Exception):
    """Internal control flow: stop the run and mark it failed."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def budget_check(iteration: int, ledger: UsageLedger, config: PipelineConfig) -> str | None:
    """Reason to stop before starting another review cycle, if any."""
    if iteration >= config.max_iterations:
        return STOP_ITERATION_CAP
    if config.token_budget is not None and ledger.total_tokens >= config.token_budget:
        return STOP_TOKEN_BUDGET
    return None


class _Session:
    """Mutable state for one pipeline run."""

    def __init__(
        self,
        requirement: str,
        backend: LlmBackend,
        exec_backend: ExecutionBackend,
        config: PipelineConfig,
        indices: Mapping[ChunkKind, RetrievalIndex] | None,
        embedder: Embedder,
        checks: Sequence[RequirementCheck],
        workdir: Path,
        run_id: str,
        retry: RetryPolicy,
        sleep: Callable[[float], None],
        signal_rules: SignalRules,
    ):
        self.requirement = requirement
        self.backend = backend
        self.exec_backend = exec_backend
        self.config = config
        self.indices = indices
        self.embedder = embedder
        self.checks = list(checks)
        self.workdir = workdir
        self.run_id = run_id
        self.retry = retry
        self.sleep = sleep
        self.signal_rules = signal_rules

        self.ledger = UsageLedger()
        self.transcript = Transcript()
        self.iteration = 0
        self.templates = {
            name: load_template(name, config.prompt_dir)
            for name in (
                "find_similar_query",
                "create_architecture",
                "write_input_file",
                "write_allrun",
                "review_architecture",
                "review_file_context",
            )
        }
        self.commands = config.command_whitelist or default_command_whitelist()
        self.runlist = config.run_whitelist or default_run_whitelist()
        self.arch_chunk: TutorialChunk | None = None
        self.architecture: CaseArchitecture | None = None
        self.workspace: CaseWorkspace | None = None
        self.last_report: ExecutionReport | None = None
        self.last_executability: Executability | None = None

    # -- LLM plumbing ------------------------------------------------

    def ask(self, role: str, action: str, prompt: str) -> str:
        request = ChatRequest.user(prompt, self.config.params())
        completion = complete_chat(request, self.backend, self.retry, self.sleep)
        self.ledger.record(action, completion.usage)
        self.transcript.record(
            role, action, self.iteration, prompt, completion.text, completion.usage
        )
        return completion.text

    def ask_parsed(self, role: str, action: str, prompt: str, parse: Callable[[str], object]):
        """One call plus at most one re-ask when the reply will not parse."""
        reply = self.ask(role, action, prompt)
        try:
            return parse(reply)
        except (ReplyParseError, DuplicateFile) as exc:
            self.transcript.record(
                role,
                f"{action}:parse_failure",
                self.iteration,
                prompt,
                reply,
                detail={"error": str(exc)},
            )
            first_error = exc
        reply = self.ask(role, f"{action}:reask", prompt + REASK_NOTE.format(error=first_error))
        try:
            return parse(reply)
        except (ReplyParseError, DuplicateFile) as exc:
            self.transcript.record(
                role,
                f"{action}:parse_failure",
                self.iteration,
                prompt,
                reply,
                detail={"error": str(exc)},
            )
            raise _Abort(STOP_PARSE_FAILURE) from exc

    # -- retrieval ---------------------------------------------------

    def _index(self, kind: ChunkKind) -> RetrievalIndex:
        assert self.indices is not None
        return self.indices[kind]

    def retrieve(self, role: str, action: str, kind: ChunkKind, query: str) -> TutorialChunk:
        try:
            hits = retrieve_similar(self._index(kind), query, self.embedder, self.config.top_k)
        except _RETRIEVAL_ERRORS as exc:
            raise _Abort(STOP_RETRIEVAL_FAILURE) from exc
        self.transcript.record(
            role,
            action,
            self.iteration,
            query,
            hits[0].chunk.id,
            detail={"hits": [{"id": h.chunk.id, "score": h.score} for h in hits]},
        )
        return hits[0].chunk

    def chunk_for_case(
        self, kind: ChunkKind, case_name: str, file_name: str | None = None
    ) -> TutorialChunk | None:
        """Exact lookup in a sub-database by tutorial case (and file)."""
        for chunk in self._index(kind).chunks:
            if chunk.case_name != case_name:
                continue
            if file_name is not None and chunk.file_name != file_name:
                continue
            return chunk
        return None

    # -- pipeline stages ----------------------------------------------

    def find_similar(self) -> None:
        prompt = render_prompt(
            self.templates["find_similar_query"], {"requirement": self.requirement}
        )
        reply = self.ask(ROLE_ARCHITECT, "find_similar_query", prompt)
        self.arch_chunk = self.retrieve(
            ROLE_ARCHITECT, "retrieve_architecture", ChunkKind.ARCHITECTURE, reply
        )

    def create_architecture(self) -> None:
        tutorial = self.arch_chunk.body if self.arch_chunk else ""
        prompt = render_prompt(
            self.templates["create_architecture"],
            {"requirement": self.requirement, "tutorial": tutorial},
        )
        subtasks = self.ask_parsed(
            ROLE_ARCHITECT, "create_architecture", prompt, parse_subtask_list
        )
        fields = parse_case_fields(self.arch_chunk.body) if self.arch_chunk else {}
        self.architecture = CaseArchitecture(
            case_name=fields.get("name", "case"),
            case_domain=fields.get("domain", ""),
            case_category=fields.get("category", ""),
            case_solver=fields.get("solver", ""),
            subtasks=list(subtasks),
        )
        self.workspace = CaseWorkspace(
            root=run_root(self.workdir, self.architecture.case_name, self.run_id)
        )

    def write_file(self, subtask: Subtask, action_prefix: str = "write_input_file") -> None:
        tutorial_file = ""
        if self.config.enable_rag:
            chunk = None
            if self.arch_chunk is not None:
                chunk = self.chunk_for_case(
                    ChunkKind.FILE_CONTEXT, self.arch_chunk.case_name, subtask.file_name
                )
            if chunk is None:
                chunk = self.retrieve(
                    ROLE_INPUT_WRITER,
                    f"retrieve_context:{subtask.file_name}",
                    ChunkKind.FILE_CONTEXT,
                    subtask.requirement_echo,
                )
            tutorial_file = chunk.body
        prompt = render_prompt(
            self.templates["write_input_file"],
            {"requirement": subtask.requirement_echo, "tutorial_file": tutorial_file},
        )
        content = self.ask_parsed(
            ROLE_INPUT_WRITER, f"{action_prefix}:{subtask.file_name}", prompt, extract_fenced_block
        )
        try:
            self.workspace.upsert(FoamFile(subtask.file_name, subtask.folder, content))
        except IoFailure as exc:
            raise _Abort(STOP_INVALID_FILE) from exc

    def write_allrun(self) -> None:
        tutorial = ""
        if self.config.enable_rag:
            chunk = None
            if self.arch_chunk is not None:
                chunk = self.chunk_for_case(ChunkKind.ALLRUN, self.arch_chunk.case_name)
            if chunk is None:
                chunk = self.retrieve(
                    ROLE_RUNNER, "retrieve_allrun", ChunkKind.ALLRUN, self.requirement
                )
            tutorial = chunk.body
        bindings = {
            "requirement": self.requirement,
            "file_list": repr(self.architecture.file_names()),
            "tutorial": tutorial,
            "commands": "\n".join(sorted(self.commands)),
            "runlists": "\n".join(sorted(self.runlist)),
        }
        prompt = render_prompt(self.templates["write_allrun"], bindings)
        script = self.ask_parsed(ROLE_RUNNER, "write_allrun", prompt, extract_fenced_block)
        violations = validate_allrun_script(script, self.commands, self.runlist)
        if violations:
            self.transcript.record(
                ROLE_RUNNER,
                "write_allrun:whitelist_violation",
                self.iteration,
                prompt,
                script,
                detail={"violations": list(violations)},
            )
            note = REASK_NOTE.format(
                error="these lines are not allowed: " + "; ".join(violations)
            )
            script = self.ask_parsed(
                ROLE_RUNNER, "write_allrun:whitelist_reask", prompt + note, extract_fenced_block
            )
        self.workspace.allrun = script

    def execute(self) -> Executability:
        materialize_case(self.workspace)
        report = execute_allrun(self.workspace, self.exec_backend, self.config.exec_timeout)
        self.last_report = report
        signals = scan_log_signals(report, self.signal_rules)
        check_results = evaluate_requirement_checks(self.workspace, self.checks)
        result = classify_executability(signals, check_results)
        self.last_executability = result
        self.transcript.record(
            ROLE_RUNNER,
            "execute_allrun",
            self.iteration,
            self.workspace.root.name,
            report.failed_command or "ok",
            detail={"score": result.score, "exit_ok": report.ok},
        )
        return result

    # -- review loop ---------------------------------------------------

    def failure_context(self) -> tuple[str, str]:
        """The failing command and its error text for reviewer prompts.

        Divergence can leave every exit code at zero, so when no step
        failed the last step's output stands in as the error evidence.
        """
        report = self.last_report
        command = report.failed_command or "Allrun"
        raw = report.error_excerpt
        if raw is None:
            raw = report.steps[-1].text if report.steps else ""
        return command, truncate_error(raw)

    def review_and_revise(self) -> None:
        command, error_text = self.failure_context()
        prompt = render_prompt(
            self.templates["review_architecture"],
            {
                "command": command,
                "error": error_text,
                "file_list": repr(self.architecture.file_names()),
                "folder_list": repr(self.architecture.folders()),
            },
        )
        targets = self.ask_parsed(ROLE_REVIEWER, "review_targets", prompt, parse_review_targets)
        try:
            decision = decide_review_action(targets, self.architecture, error_text)
        except EmptyTargets as exc:
            raise _Abort(STOP_EMPTY_REVIEW) from exc
        self.transcript.record(
            ROLE_REVIEWER,
            "review_decision",
            self.iteration,
            error_text,
            decision.action.value,
            detail={"targets": [list(t) for t in decision.targets], "reason": decision.reason},
        )
        if (
            decision.action is ReviewAction.ARCHITECTURE_REVISION
            and self.config.enable_review_architecture
        ):
            self.revise_architecture(error_text, command)
        else:
            self.rewrite_files(decision, error_text, command)

    def revise_architecture(self, error_text: str, command: str) -> None:
        tutorial = self.arch_chunk.body if self.arch_chunk else ""
        revision_requirement = (
            f"{self.requirement}\n"
            f"The previous case architecture failed at `{command}` with this error:\n"
            f"{error_text}\n"
            "Revise the architecture so the missing or misplaced input files are included."
        )
        prompt = render_prompt(
            self.templates["create_architecture"],
            {"requirement": revision_requirement, "tutorial": tutorial},
        )
        subtasks = self.ask_parsed(
            ROLE_ARCHITECT, "revise_architecture", prompt, parse_subtask_list
        )
        added = self.architecture.merge(subtasks)
        for subtask in added:
            self.write_file(subtask, action_prefix="write_new_file")

    def rewrite_files(self, decision: ReviewDecision, error_text: str, command: str) -> None:
        pairs = list(decision.targets)
        if decision.action is ReviewAction.ARCHITECTURE_REVISION:
            # Revision was called for but is disabled: fall back to
            # rewriting whichever named files already exist.
            pairs = [t for t in pairs if self.architecture.has_file(t[0])]
            if not pairs:
                raise _Abort(STOP_EMPTY_REVIEW)
        resolved = [(name, self.architecture.folder_of(name) or folder) for name, folder in pairs]
        related = []
        for file_name, folder in resolved:
            existing = self.workspace.find(file_name, folder)
            body = existing.content if existing else ""
            related.append(
                f"the original content of {file_name} in {folder} folder is:\n{body}\n"
            )
        related_text = "\n".join(related)
        file_list = repr([name for name, _ in resolved])
        folder_list = repr([folder for _, folder in resolved])
        for file_name, folder in resolved:
            prompt = render_prompt(
                self.templates["review_file_context"],
                {
                    "file_name": file_name,
                    "file_folder": folder,
                    "error": error_text,
                    "file_list": file_list,
                    "folder_list": folder_list,
                    "command": command,
                    "related_files": related_text,
                },
            )
            content = self.ask_parsed(
                ROLE_INPUT_WRITER, f"rewrite_file:{file_name}", prompt, extract_fenced_block
            )
            try:
                self.workspace.rewrite(file_name, folder, content)
            except IoFailure as exc:
                raise _Abort(STOP_INVALID_FILE) from exc


def run_pipeline(
    requirement: str,
    backend: LlmBackend,
    exec_backend: ExecutionBackend,
    workdir: str | Path,
    config: PipelineConfig | None = None,
    indices: Mapping[ChunkKind, RetrievalIndex] | None = None,
    embedder: Embedder | None = None,
    checks: Sequence[RequirementCheck] = (),
    run_id: str = "run0",
    retry: RetryPolicy | None = None,
    sleep: Callable[[float], None] = time.sleep,
    signal_rules: SignalRules | None = None,
    confirm_hook: Callable[[CaseWorkspace, Executability], bool] | None = None,
) -> RunOutcome:
    """Drive one requirement through the full agent loop.

    `indices` is required when retrieval is enabled.  `confirm_hook`, if
    given, is consulted once for runs that complete without passing all
    requirement checks; returning True lifts the final score to 4, False
    pins it at 3.
    """
    config = config or PipelineConfig()
    if config.enable_rag and indices is None:
        raise ConfigError("retrieval is enabled but no tutorial database was given")
    session = _Session(
        requirement=requirement,
        backend=backend,
        exec_backend=exec_backend,
        config=config,
        indices=indices,
        embedder=embedder or HashedTokenEmbedder(),
        checks=checks,
        workdir=Path(workdir),
        run_id=run_id,
        retry=retry or RetryPolicy(),
        sleep=sleep,
        signal_rules=signal_rules or SignalRules(),
    )

    start = time.monotonic()
    stop_reason = STOP_COMPLETED
    result: Executability
    try:
        if config.enable_rag:
            session.find_similar()
        session.create_architecture()
        for subtask in session.architecture.subtasks:
            session.write_file(subtask)
        session.write_allrun()
        result = session.execute()
        while result.score < 3:
            reason = budget_check(session.iteration, session.ledger, config)
            if reason is not None:
                stop_reason = reason
                break
            if not config.enable_reviewer:
                stop_reason = STOP_REVIEWER_DISABLED
                break
            session.review_and_revise()
            session.iteration += 1
            result = session.execute()
    except _Abort as abort:
        stop_reason = abort.reason
        result = session.last_executability or Executability(
            score=0, rationale=f"run aborted before execution: {abort.reason}"
        )

    succeeded = stop_reason == STOP_COMPLETED and result.score >= 3
    if succeeded and result.score == 3 and confirm_hook is not None:
        accepted = bool(confirm_hook(session.workspace, result))
        result = classify_executability(
            scan_log_signals(session.last_report, session.signal_rules),
            result.requirement_checks,
            human_override=accepted,
        )

    wall = time.monotonic() - start
    workspace = session.workspace or CaseWorkspace(root=run_root(workdir, "unbuilt", run_id))
    stats = collect_code_stats(workspace)
    return RunOutcome(
        requirement=requirement,
        case_name=session.architecture.case_name if session.architecture else "",
        executability=result,
        iterations=session.iteration,
        stop_reason=stop_reason,
        succeeded=succeeded,
        workspace=workspace,
        ledger=session.ledger,
        transcript=session.transcript,
        code_stats=stats,
        wall_time_seconds=wall,
    )
