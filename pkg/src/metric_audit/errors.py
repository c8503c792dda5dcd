"""Exception hierarchy shared by all modules.

Exit codes used by the CLI: 2 config, 3 data, 4 statistical precondition.
"""


class MetricAuditError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(MetricAuditError):
    """Invalid or incomplete run configuration.

    ``problems`` holds every detected issue, not just the first one.
    """

    exit_code = 2

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataError(MetricAuditError):
    """Malformed records, broken references, or violated corpus invariants."""

    exit_code = 3

    def __init__(self, message, *, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)


class StatError(MetricAuditError):
    """A statistical precondition does not hold (e.g. constant input, n too small)."""

    exit_code = 4
