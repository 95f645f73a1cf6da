"""Session hosting: the engine, file store, HTTP API, REPL, and CLI."""

from .engine import Engine, Session, TurnResponse
from .store import SessionStore

__all__ = ["Engine", "Session", "SessionStore", "TurnResponse"]
