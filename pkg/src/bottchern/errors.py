"""Exception hierarchy.

Precondition and input failures derive from :class:`PreconditionError` (CLI
exit code 2); a failed internal self-check raises :class:`InvariantViolation`
(exit code 3).
"""


class BottChernError(Exception):
    pass


class PreconditionError(BottChernError):
    pass


class InvariantViolation(BottChernError):
    pass


class DomainError(PreconditionError, ValueError):
    pass


class ParseError(PreconditionError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class NonIntegrable(PreconditionError):
    pass


class JacobiViolation(PreconditionError):
    pass


class FormNotInKernel(PreconditionError):
    pass


class NoClosedRepresentative(BottChernError):
    pass


class IllConditioned(BottChernError):
    pass


class PreconditionFailed(PreconditionError):
    pass


class TowerInfeasible(BottChernError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NonRealForm(PreconditionError):
    pass


class DegenerateFrame(BottChernError):
    pass


class LPNumericalFailure(BottChernError):
    pass


class WrongDimension(PreconditionError):
    pass


class FrameSingular(PreconditionError):
    pass


class CentralFibreNotPositive(PreconditionError):
    pass


class ClosednessFailure(PreconditionError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
