"""Exception hierarchy.

Configuration problems and physics failures are kept apart so the CLI can map
them to different exit codes.
"""


class CslTrapError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(CslTrapError):
    """Malformed or out-of-range configuration input."""

    def __init__(self, message, line=None, column=None, key=None):
        self.line = line
        self.column = column
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class PhysicsError(CslTrapError):
    """A physical configuration that the requested operation cannot handle."""

    code = "PHYSICS"


class RadialUnconfinedError(PhysicsError):
    code = "RADIAL_UNCONFINED"


class MisalignedError(PhysicsError):
    code = "MISALIGNED"


class SoftModeError(PhysicsError):
    code = "SOFT_MODE"


class DegenerateModeError(PhysicsError):
    code = "DEGENERATE_MODE"


class ZeroCouplingError(PhysicsError):
    code = "ZERO_COUPLING"


class InvalidBaseError(PhysicsError):
    code = "INVALID_BASE"
