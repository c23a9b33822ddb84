"""foamagent: natural-language CFD case construction for OpenFOAM.

A requirement sentence goes in; a retrieval-augmented agent loop plans
the case, writes its input files and Allrun script, executes it, and
reviews failures until the run completes or the budget is spent.  Every
LLM and execution dependency sits behind a small interface, so the
whole pipeline also runs offline against scripted backends.
"""

from foamagent.errors import FoamAgentError
from foamagent.orchestrator.pipeline import PipelineConfig, RunOutcome, run_pipeline

__version__ = "0.1.0"

__all__ = ["FoamAgentError", "PipelineConfig", "RunOutcome", "run_pipeline", "__version__"]
