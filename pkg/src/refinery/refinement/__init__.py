"""Refinement core: statements, the law catalog, the specification
tree, scripts, spec files, and the procedure library."""

from .laws import (
    FLEXIBLE,
    INITIALISED,
    PENDING,
    PROVED,
    REFUTED,
    UNKNOWN,
    AssignLaw,
    Binding,
    Expand,
    FlexSeq,
    FollowAssign,
    IfElse,
    InitSkip,
    Iterate,
    LawError,
    ProcCall,
    ProofObligation,
    RefinementLaw,
    RefinementStep,
    SeqLaw,
    Skip,
    Traverse,
    apply_law,
    instantiate,
    law_name,
    negate_spec,
)
from .library import (Library, LibraryError, LibraryMatch,
                      ProcedureEntry, parse_entry, render_entry)
from .scripts import ScriptError, parse_law_line, parse_script, render_law
from .specfile import SpecFileError, parse_spec_file, render_spec_file
from .statement import SpecFile, SpecStatement
from .tree import CLOSED, FAILED, OPEN, REFINED, Failure, RefineNode, SpecTree, TreeError

__all__ = [name for name in dir() if not name.startswith("_")]
