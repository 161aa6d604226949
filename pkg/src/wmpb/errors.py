"""Exception types raised across the workbench."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ParseError(WorkbenchError):
    """A source file could not be parsed; message names the line."""


class SchemaError(WorkbenchError):
    """A record was parseable but violated the declared schema."""


class InsufficientDataError(WorkbenchError):
    """Not enough records survived filtering to satisfy a sample request."""


class EmptyInputError(WorkbenchError):
    """An operation that needs at least one element got none."""


class TooShortError(WorkbenchError):
    """Text is too short to score (fewer than 2 tokens)."""


class UnknownTokenError(WorkbenchError):
    """A prompt token is not in the model vocabulary."""


class NotFittedError(WorkbenchError):
    """A model or embedder was used before fit()."""


class DimensionError(WorkbenchError):
    """Vector or table shapes do not line up."""


class SingleClassError(WorkbenchError):
    """ROC-family metrics need records from both truth classes."""


class ConfigError(WorkbenchError):
    """Experiment configuration is invalid or a stage prerequisite is missing."""


class BridgeError(WorkbenchError):
    """Base class for sidecar-process failures."""


class BridgeConnectivityError(BridgeError):
    """The sidecar process died, hung up, or never completed the handshake."""


class BridgeProtocolError(BridgeError):
    """The sidecar answered, but with a response that violates the protocol."""


class BridgeOpError(BridgeError):
    """The sidecar reported ok=false for a single request."""
