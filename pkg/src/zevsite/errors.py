"""Exception types raised across the package."""


class ZevsiteError(ValueError):
    """Base class for all input and domain errors."""


class DuplicateVertex(ZevsiteError):
    pass


class TooFewVertices(ZevsiteError):
    pass


class ParseError(ZevsiteError):
    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnknownRoute(ParseError):
    pass


class UnknownVehicleClass(ParseError):
    pass


class EmptyWeightSet(ZevsiteError):
    pass


class InvalidVehicleClass(ZevsiteError):
    pass


class NonPositiveInputs(ZevsiteError):
    pass


class AmountExceedsCapacity(ZevsiteError):
    pass


class UnsortedStations(ZevsiteError):
    pass


class SiteNotOnRoute(ZevsiteError):
    pass


class NoCandidates(ZevsiteError):
    pass


class TooManyCandidates(ZevsiteError):
    pass


class NonMonotoneAdoption(ZevsiteError):
    pass


class NonPositiveHorizon(ZevsiteError):
    pass
