"""Exception hierarchy shared across the package.

Every error carries a human-readable message; parsers additionally point
at the offending location (file, line, or chunk) so ingestion failures
are actionable.
"""

from __future__ import annotations


class FoamAgentError(Exception):
    """Base class for all errors raised by this package."""


# --- retrieval database -------------------------------------------------


class ChunkParseError(FoamAgentError):
    """A sub-database document violates the chunk delimiter grammar."""


class UnterminatedChunk(ChunkParseError):
    """A begin marker was never closed by its end marker."""


class MissingHeaderField(ChunkParseError):
    """A chunk lacks a mandatory metadata field (such as the case name)."""


class DuplicateChunk(ChunkParseError):
    """Two chunks in one database share (kind, case name, file name)."""


class EmptyText(FoamAgentError):
    """Text handed to the embedder is empty or whitespace-only."""


class EmbedderFailure(FoamAgentError):
    """The embedding backend failed to produce a vector."""


class DimensionMismatch(FoamAgentError):
    """Two vectors of different dimension were combined."""


class ZeroVector(FoamAgentError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmptyCorpus(FoamAgentError):
    """The corpus location contains no parsable chunks."""


class EmptyIndex(FoamAgentError):
    """A query was issued against an index with no entries."""


class EmbedderMismatch(FoamAgentError):
    """A persisted vector sidecar was produced by a different embedder."""


# --- llm backends -------------------------------------------------------


class InvalidRequest(FoamAgentError):
    """A chat request violates the request contract."""


class TransportError(FoamAgentError):
    """A transient transport failure (timeout, connection loss, 5xx)."""


class BackendError(FoamAgentError):
    """The backend returned a well-formed but non-retryable error."""


class BackendScriptExhausted(FoamAgentError):
    """A scripted backend received more requests than it has replies."""


class ScriptMatchError(FoamAgentError):
    """A scripted reply's match string was absent from the request."""


# --- prompt templates and reply parsers ----------------------------------


class MissingBinding(FoamAgentError):
    """A template placeholder has no value in the bindings."""


class UnknownPlaceholder(FoamAgentError):
    """A template body names a placeholder outside the known vocabulary."""


class ReplyParseError(FoamAgentError):
    """Base class for agent-reply grammar violations."""


class NoHeader(ReplyParseError):
    """A subtask list reply lacks the 'splits into N subtasks:' header."""


class CountMismatch(ReplyParseError):
    """Declared subtask count differs from the number of subtask lines."""


class MalformedSubtaskLine(ReplyParseError):
    """A subtask line does not follow the subtask grammar."""


class NoFence(ReplyParseError):
    """A reply expected to carry a fenced block contains no fence."""


class UnterminatedFence(ReplyParseError):
    """A fenced block was opened but never closed."""


class MissingFileMarkers(ReplyParseError):
    """A review reply lacks the ###...### file group."""


class MissingFolderMarkers(ReplyParseError):
    """A review reply lacks the ``...`` folder group."""


class ArityMismatch(ReplyParseError):
    """A review reply names a different number of files and folders."""


class EmptyTargets(FoamAgentError):
    """A review decision has no target files and no missing-file signal."""


# --- case workspace ------------------------------------------------------


class IoFailure(FoamAgentError):
    """A filesystem operation failed; the message names the path."""


class DuplicateFile(FoamAgentError):
    """Two case files share the same (file name, folder) slot."""


# --- execution -----------------------------------------------------------


class MissingAllrun(FoamAgentError):
    """Execution was requested for a workspace without an Allrun script."""


class BackendUnavailable(FoamAgentError):
    """The execution backend cannot run in this environment."""


class ScenarioRuleMissing(FoamAgentError):
    """A simulated command matched no rule in the scenario."""


# --- metrics and reports -------------------------------------------------


class InvalidInput(FoamAgentError):
    """Metric arguments violate their documented bounds."""


class ZeroLines(FoamAgentError):
    """Productivity is undefined for a non-positive line count."""


class LengthMismatch(FoamAgentError):
    """Paired series handed to a metric have different lengths."""


class ConstantSeries(FoamAgentError):
    """Correlation is undefined when a series has zero variance."""


class InconsistentN(FoamAgentError):
    """Benchmark cases were aggregated with differing run counts."""


# --- configuration -------------------------------------------------------


class ConfigError(FoamAgentError):
    """A config file, manifest, or fixture is malformed."""
