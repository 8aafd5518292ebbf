"""Exception hierarchy, mapped to CLI exit codes."""


class EmopackError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class ConfigError(EmopackError):
    """Bad configuration: missing files, out-of-range fractions, unknown keys."""

    exit_code = 2


class DataError(EmopackError):
    """Bad input data: malformed manifests, unknown labels, unsatisfiable pools."""

    exit_code = 3


class InvariantError(EmopackError):
    """An internal postcondition failed; indicates a bug, not bad input."""

    exit_code = 4
