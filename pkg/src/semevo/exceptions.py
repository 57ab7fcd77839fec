"""Exception hierarchy."""


class SemevoError(Exception):
    """Base class for all package errors."""


class InvalidRelationError(SemevoError, ValueError):
    """Malformed relation: unknown type, self-loop, bad score or empty concept."""


class NoSuchConceptError(SemevoError, KeyError):
    pass


class ParseError(SemevoError, ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class EmptyStoreError(SemevoError):
    """Ingestion left no assertions."""


class ExhaustedStoreError(SemevoError):
    """No concept satisfies the requested score threshold."""


class InvalidPairError(SemevoError, ValueError):
    """Crossover concepts are not interchangeable."""


class InfeasibleMutation(SemevoError):
    """The chosen mutation cannot be applied to this parent."""


class ConfigError(SemevoError, ValueError):
    pass
