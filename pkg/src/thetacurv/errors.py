"""Exception hierarchy shared by every module.

Two families matter to callers: :class:`InputError` (bad text or configuration,
CLI exit code 1) and :class:`NumericError` (the mathematics refused, exit code 2).
"""


class InputError(ValueError):
    """Malformed user input: expressions, configs, builtin names."""


class ExpressionSyntaxError(InputError):
    def __init__(self, message, offset, expected):
        self.offset = offset
        self.expected = expected
        super().__init__(f"{message} at byte {offset} (expected {expected})")


class UnknownIdentifier(InputError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at byte {offset}")


class UnknownBuiltin(InputError):
    pass


class ConfigError(InputError):
    pass


class NumericError(ArithmeticError):
    """A numerical operation could not produce a meaningful result."""


class DomainError(NumericError):
    pass


class DepthExceeded(NumericError):
    pass


class OutOfRange(NumericError):
    def __init__(self, message, interval=None):
        self.interval = interval
        if interval is not None:
            message = f"{message}; attainable interval is [{interval[0]!r}, {interval[1]!r}]"
        super().__init__(message)


class OutOfSegment(OutOfRange):
    pass


class OutOfDomain(OutOfRange):
    pass


class SingularPoint(NumericError):
    pass


class EverywhereFlat(NumericError):
    pass


class StepTooLarge(NumericError):
    pass


class VanishingCurvature(NumericError):
    pass


class AxisContact(NumericError):
    pass


class DegenerateAllVertices(NumericError):
    """Raised instead of reporting a continuum of vertices (dκ/ds ≡ 0)."""


class EmptyInput(NumericError):
    pass
