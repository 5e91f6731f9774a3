"""Exception hierarchy shared across the engine.

Every failure surfaced by the public API is an instance of GridQAError so
callers can distinguish engine failures from programming errors.
"""


class GridQAError(Exception):
    """Base class for all engine errors."""

    code = "internal"


class ParseError(GridQAError):
    """Malformed input document (schema, data file, lexicon, corpus)."""

    code = "bad_request"


class ValidationError(GridQAError):
    """Structurally well-formed document violating a schema invariant."""

    code = "bad_request"


class SchemaViolation(GridQAError):
    """Instance data inconsistent with the ontology schema."""

    code = "bad_request"


class UnknownVertex(GridQAError):
    code = "not_found"


class UnknownAttribute(GridQAError):
    code = "bad_request"


class TypeMismatch(GridQAError):
    code = "bad_request"


class EmptyQuestion(GridQAError):
    code = "bad_request"


class UnparseableInput(GridQAError):
    """No dependency-tree root could be identified for the question."""

    code = "parse_failed"


class NoTargetFound(GridQAError):
    """Neither target-extraction pattern matched the dependency tree."""

    code = "no_target"


class DanglingQualifier(GridQAError):
    """A time/logic tag could not be attached to any entity tag."""

    code = "parse_failed"


class UnresolvedTarget(GridQAError):
    code = "no_target"


class NoPath(GridQAError):
    """No schema route between two classes (disconnected schema)."""

    code = "internal"


class InconsistentPlan(GridQAError):
    """Reasoning plan and parsed question disagree."""

    code = "internal"


class UnknownSession(GridQAError):
    code = "not_found"
