"""Exception types shared across the engine."""

from __future__ import annotations


class KgqaError(Exception):
    """Base class for all engine errors."""


class ParseError(KgqaError):
    """A KB document could not be parsed."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class Violation:
    """One validation failure found while loading a KB."""

    __slots__ = ("kind", "location", "message")

    def __init__(self, kind: str, location: str, message: str):
        self.kind = kind
        self.location = location
        self.message = message

    def __repr__(self):
        return f"Violation({self.kind!r}, {self.location!r}, {self.message!r})"

    def __str__(self):
        return f"[{self.kind}] {self.location}: {self.message}"

    def __eq__(self, other):
        return (
            isinstance(other, Violation)
            and (self.kind, self.location, self.message)
            == (other.kind, other.location, other.message)
        )


class ValidationError(KgqaError):
    """A KB violated one or more structural invariants."""

    def __init__(self, violations: list[Violation]):
        super().__init__(
            f"{len(violations)} violation(s): "
            + "; ".join(str(v) for v in violations[:5])
            + ("..." if len(violations) > 5 else "")
        )
        self.violations = violations


class UnknownProperty(KgqaError):
    pass


class NotALeaf(KgqaError):
    pass


class SpanMismatch(KgqaError):
    pass


class NoCandidates(KgqaError):
    """No candidate property chains; the question is vague."""


class NoGraphs(KgqaError):
    """No query graph could be generated; fall back to recommendation."""


class EmptyInput(KgqaError):
    pass


class EmptyTrainingSet(KgqaError):
    pass


class NoReifyingAncestor(KgqaError):
    """No entity reachable over member_of edges reifies the property."""


class AmbiguousAncestor(KgqaError):
    """Two entities at the same member_of depth reify the property."""


class DanglingGraph(KgqaError):
    """A query graph references ids absent from the KB snapshot."""


class UnknownLocale(KgqaError):
    pass


class InternalError(KgqaError):
    """Pipeline failure, tagged with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause
