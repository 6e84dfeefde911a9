"""CLI commands, the JSON session API, and the evaluation harness."""

from .evalharness import EvalReport, EvalRow, evaluate_corpus
from .server import SessionStore, make_handler, serve
from .sessions import Session, SessionError

__all__ = [name for name in dir() if not name.startswith("_")]
