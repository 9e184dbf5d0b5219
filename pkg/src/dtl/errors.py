"""Exception hierarchy. Everything raised on bad data derives from DtlError."""


class DtlError(Exception):
    pass


class InvalidInput(DtlError, ValueError):
    pass


class DimensionMismatch(InvalidInput):
    pass


class DegenerateSimplex(DtlError, ValueError):
    pass


class DuplicatePoints(InvalidInput):
    pass


class DegenerateInput(InvalidInput):
    """All points lie in a proper affine subspace."""


class Unsupported(DtlError, NotImplementedError):
    pass


class UnsupportedDimension(Unsupported):
    pass


class OutsideHullError(DtlError, ValueError):
    pass


class OnFacetError(DtlError, ValueError):
    pass


class NonFiniteObjective(DtlError, FloatingPointError):
    pass


class ParseError(DtlError, ValueError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.row = row
        self.column = column


class EmptyDataset(ParseError):
    pass


class IoError(DtlError, OSError):
    pass


class ModelFormatError(DtlError, ValueError):
    pass
