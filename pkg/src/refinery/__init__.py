"""refinery: a program-refinement workbench.

Specification statements ``frame: [pre, post]`` are turned into
executable While-programs by applying refinement laws; each application
emits proof obligations that are discharged by a bounded exhaustive
checker and/or an external SMT-LIB solver.  A pluggable oracle
(scripted, heuristic, or a remote LLM) proposes the laws, with retry
and backtracking.
"""

__version__ = "0.1.0"
