"""What a proposer sees: the current statement, the failure history of
its node, library hints, and the remaining retry budget."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..refinement import RefinementLaw, SpecStatement


@dataclass
class OracleContext:
    stmt: SpecStatement
    path: str = "root"
    failures: tuple = ()          # Failure entries, oldest first
    hints: tuple = ()             # rendered library signatures
    retries_left: int = 0
    defs: dict = field(default_factory=dict)
    library: object | None = None


@dataclass
class LawProposal:
    law: RefinementLaw
    rationale: str = ""
    raw_reply: str = ""


class OracleError(Exception):
    pass


class NoProposalFound(OracleError):
    pass


class IllTypedProposal(OracleError):
    def __init__(self, details: str):
        super().__init__(details)
        self.details = details


class OracleExhausted(OracleError):
    pass


class OracleTransportError(OracleError):
    """Remote failure; the attempt may be retried."""
