"""Exception types shared across the package.

Each class carries the process exit code the CLI uses when it escapes a
command, so the mapping lives next to the type instead of in a lookup table.
"""


class HashGNNError(Exception):
    exit_code = 1


class ConfigError(HashGNNError, ValueError):
    """Invalid parameter or command-line configuration."""

    exit_code = 2


class ParseError(HashGNNError, ValueError):
    """Malformed or unreadable input file."""

    exit_code = 3

    def __init__(self, message, *, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(HashGNNError, ValueError):
    """Input parsed fine but violates a data-model invariant."""

    exit_code = 4


class HashDomainError(ValidationError):
    """Element id outside the domain [0, c) of a hash function."""


class EmptySetError(ValidationError):
    """MinHash requested for an empty set; callers substitute the sentinel."""


class SplitError(ValidationError):
    """Edge split or negative sampling impossible for the given graph."""


class ResourceError(HashGNNError):
    exit_code = 5
