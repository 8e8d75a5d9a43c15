"""Exception types raised across the package."""


class LsmError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(LsmError, ValueError):
    pass


class KernelRangeError(LsmError, ValueError):
    """A kernel produced a value outside [0, 1]."""


class InvalidInputError(LsmError, ValueError):
    pass


class ResourceLimitError(LsmError):
    pass


class NumericalError(LsmError, ArithmeticError):
    pass


class IngestionError(LsmError, ValueError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
