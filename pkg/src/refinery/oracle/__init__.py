"""Law proposers and the automated refinement driver."""

from .catalog import LAW_MENU, law_menu_text
from .context import (
    IllTypedProposal,
    LawProposal,
    NoProposalFound,
    OracleContext,
    OracleError,
    OracleExhausted,
    OracleTransportError,
)
from .driver import (
    DEFAULT_MAX_PROPOSALS,
    DEFAULT_RETRIES,
    EXHAUSTED,
    FULLY_REFINED,
    DriveLimits,
    DriveReport,
    Transcript,
    drive_refinement,
)
from .oracles import (
    LLM_KEY_ENV,
    LLM_URL_ENV,
    HeuristicOracle,
    Oracle,
    RemoteOracle,
    ScriptedOracle,
    make_oracle,
)
from .prompts import build_prompt
from .proposals import parse_proposal

__all__ = [name for name in dir() if not name.startswith("_")]
