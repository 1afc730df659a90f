class AnisopushError(Exception):
    pass


class ConfigError(AnisopushError):
    pass


class InvalidEllipseError(AnisopushError, ValueError):
    pass


class ZeroVelocityError(AnisopushError, ValueError):
    pass


class NonFiniteWrenchError(AnisopushError, ValueError):
    pass


class SimulationNotConvergedError(AnisopushError):
    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class RankDeficientFitError(AnisopushError):
    pass


class DegenerateMapError(AnisopushError):
    pass


class EllipseFitError(AnisopushError):
    pass


class DissipativityError(EllipseFitError):
    def __init__(self, message, parameters):
        super().__init__(message)
        self.parameters = parameters


class NoSlidingSamplesError(AnisopushError):
    pass


class RecordFormatError(AnisopushError):
    def __init__(self, message, row=None, column=None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column
