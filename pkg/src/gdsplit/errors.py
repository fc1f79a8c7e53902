"""Exception hierarchy shared by every gdsplit module."""


class GdsError(Exception):
    """Base class for all errors raised by gdsplit."""


class ParameterError(GdsError, ValueError):
    """An argument is outside its documented range."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class InvalidBasisError(ParameterError):
    """A frame is not orthonormal within tolerance."""


class DimensionError(ParameterError):
    """Frames or matrices have incompatible shapes."""


class InfeasibleProfileError(ParameterError):
    """No derivative profile of the requested shape integrates to one."""


class ResolutionError(ParameterError):
    """A box partition would be too fine to allocate."""


class NumericError(GdsError, ArithmeticError):
    """A computation produced non-finite or degenerate values.

    ``step`` records the orbit step at which the problem appeared and
    ``point`` the torus point involved, when known.
    """

    def __init__(self, message, step=None, point=None, operation=None):
        super().__init__(message)
        self.step = step
        self.point = point
        self.operation = operation


class SingularRestrictionError(NumericError):
    """A restricted linear map lost rank."""


class ConfigError(GdsError):
    """Base class for experiment-config problems."""


class ConfigParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class ConfigValidationError(ConfigError):
    def __init__(self, message, field_path):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path
