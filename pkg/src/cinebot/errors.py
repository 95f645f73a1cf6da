"""Exception types shared across the engine."""

from __future__ import annotations


class CinebotError(Exception):
    """Base class for all errors raised by this package."""


class UnknownSlotError(CinebotError):
    """An unknown slot name was parsed; the slot set is closed."""


class ConstraintKindError(CinebotError):
    """A constraint's operator or value does not fit the slot's value kind."""


class CatalogError(CinebotError):
    """The item catalog could not be loaded or is unusable."""


class LexiconSlotError(CinebotError):
    """A lexicon was requested for a slot that does not carry one."""


class PatternRegistryError(CinebotError):
    """The pattern registry file is malformed or incomplete."""


class TemplateError(CinebotError):
    """No template exists for a (intent, signature) pair, or one failed to render."""


class WireFormatError(CinebotError):
    """A serialized record could not be decoded."""


class SessionNotFoundError(CinebotError):
    """The requested session id does not exist."""


class SessionClosedError(CinebotError):
    """A turn was posted to a session that has ended or expired."""


class UtteranceTooLongError(CinebotError):
    """A free-text utterance exceeded the size limit."""
