"""Engine exceptions.

Every error carries the process exit code the CLI reports for it, the way an
HTTP error carries its status code.
"""


class EngineError(Exception):
    exit_code = 3

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UsageError(EngineError):
    exit_code = 1


class InputError(EngineError):
    exit_code = 2


class InvariantViolation(EngineError):
    exit_code = 3


class OracleMismatch(EngineError):
    exit_code = 4


# --- Algebra errors ---

class FieldError(InvariantViolation):
    pass


class LabelMismatch(InvariantViolation):
    pass


class SingularPivotError(InvariantViolation):
    pass


class CyclicSupportError(InvariantViolation):
    pass


class InvalidMatchingError(InvariantViolation):
    pass


class NotNilpotentError(InvariantViolation):
    pass


class InstanceTooLarge(UsageError):
    pass
