"""Exception hierarchy shared by the whole package."""

from __future__ import annotations


class AlvisError(Exception):
    """Base class for every error raised by this package."""


class MalformedIdError(AlvisError, ValueError):
    """An identifier does not carry a known layer prefix."""

    def __init__(self, unit_id: str):
        super().__init__(f"malformed identifier {unit_id!r}: no known layer prefix")
        self.unit_id = unit_id


class IntegrityError(AlvisError):
    """References that do not resolve, duplicate IDs, mismatched records."""

    def __init__(self, message: str, missing_ids: tuple[str, ...] | list[str] = ()):
        super().__init__(message)
        self.missing_ids = tuple(missing_ids)


class ReconstructionError(AlvisError):
    """Tokens do not partition the text they claim to cover."""

    def __init__(self, message: str, ordinal: int | None = None, report=None):
        super().__init__(message)
        self.ordinal = ordinal
        self.report = report


class ConfigurationError(AlvisError):
    """Bad pipeline configuration or resource definition."""

    def __init__(self, message: str, resource: str | None = None):
        super().__init__(message)
        self.resource = resource


class ResourceFormatError(AlvisError):
    """A line-oriented resource file could not be read."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class XmlParseError(AlvisError):
    """Malformed XML; carries the location reported by the XML parser."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(AlvisError):
    """Well-formed XML that does not follow the document-record vocabulary."""

    def __init__(self, message: str, element: str | None = None):
        super().__init__(message)
        self.element = element


class SerializationError(AlvisError):
    """A record cannot be written, e.g. because it fails validation."""

    def __init__(self, message: str, rules: tuple[str, ...] = ()):
        super().__init__(message)
        self.rules = tuple(rules)
