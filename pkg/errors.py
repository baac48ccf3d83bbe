class PackingError(Exception):
    """Base class for all solver errors"""


class InstanceError(PackingError):
    """Instance is well-formed but semantically invalid (zero dimension, item fits no bin, ...)"""


class InstanceParseError(InstanceError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class InvalidNodeError(PackingError):
    pass


class StaleOptionError(PackingError):
    """Insertion option no longer matches the solution it was enumerated against"""


class OracleBudgetError(PackingError):
    pass


class NoFeasibleSolutionError(PackingError):
    pass


class SolutionValidationError(PackingError):
    def __init__(self, violations):
        self.violations = list(violations)
        preview = "; ".join(str(v) for v in self.violations[:3])
        super().__init__(f"Solution failed validation ({len(self.violations)} violation(s)): {preview}")
