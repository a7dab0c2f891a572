"""
Exception hierarchy of the bumping-route toolkit.

Library code raises these; the HTTP routes translate them into HTTPException
and the `bump` command translates them into exit codes.
"""


class BumpError(Exception):
    """Base class for all domain errors."""


class InvalidDiagramError(BumpError, ValueError):
    """Row lengths do not form a Young diagram."""


class InvalidTableauError(BumpError, ValueError):
    """Rows or columns of a tableau are not strictly increasing, or its shape is invalid."""


class DuplicateEntryError(BumpError, ValueError):
    """An entry equal to an existing one was inserted."""


class InvalidCornerError(BumpError, ValueError):
    """A box is not an outer corner of the diagram it is added to."""


class InvalidPathError(BumpError, ValueError):
    """A sequence of diagrams is not a path in the Young graph."""


class InvalidParameterError(BumpError, ValueError):
    """A numeric parameter is outside of its domain."""


class ConfigError(BumpError, ValueError):
    """An experiment configuration is inconsistent."""
