"""Exception hierarchy.

The CLI maps these onto exit codes: ``ConfigError`` and ``GeometryError`` are
input errors (1), ``DomainError`` covers unreachable and singular situations
(2), ``NumericalError`` covers solver failures (3).
"""


class PRRError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PRRError, ValueError):
    """A geometry file or CLI argument could not be parsed."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class GeometryError(PRRError, ValueError):
    pass


class NonUnitDirection(GeometryError):
    pass


class NonParallelRails(GeometryError):
    pass


class NonPositiveLength(GeometryError):
    pass


class UnorderedPlatformOffsets(GeometryError):
    pass


class DomainError(PRRError):
    pass


class LegError(DomainError):
    """A per-leg failure; ``leg`` is 1-based, ``margin`` is how far off it is."""

    def __init__(self, leg, margin, message=""):
        self.leg = leg
        self.margin = margin
        super().__init__(message or f"leg {leg} (margin {margin:.6g})")


class Unreachable(LegError):
    pass


class StrokeViolation(LegError):
    pass


class SerialSingularity(LegError):
    pass


class ParallelSingularity(DomainError):
    pass


class RailMisaligned(DomainError):
    pass


class SingularIteration(DomainError):
    pass


class SingularityEncountered(DomainError):
    """Raised by the trajectory simulator; carries the trace recorded so far."""

    def __init__(self, step, report, trace=None):
        self.step = step
        self.report = report
        self.trace = trace
        super().__init__(f"singularity at step {step}: {report.kind.name}")


class NumericalError(PRRError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )
