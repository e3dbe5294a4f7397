"""Exception hierarchy shared by the engine and the CLI."""


class FormalCohError(Exception):
    pass


class DimensionMismatch(FormalCohError, ValueError):
    pass


class InvalidInput(FormalCohError, ValueError):
    pass


class NotAChainMap(FormalCohError):
    """Raised when a map fails to commute with differentials at a realized degree."""

    def __init__(self, index, degree, message="map does not commute with differentials"):
        super().__init__(f"{message} at index {index}, degree {tuple(degree)}")
        self.index = index
        self.degree = tuple(degree)


class Inconclusive(FormalCohError):
    """A stabilization certificate could not be produced within the stage bound.

    Never a silent answer: callers either enlarge the bound or surface this.
    """

    def __init__(self, what, index=None, degree=None, stage=None, bound=None, detail=""):
        loc = ""
        if index is not None:
            loc += f" at index {index}"
        if degree is not None:
            loc += f", degree {tuple(degree)}"
        msg = f"inconclusive: {what}{loc}"
        if bound is not None:
            msg += f" (last change at stage {stage}, stage bound {bound})"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)
        self.what = what
        self.index = index
        self.degree = None if degree is None else tuple(degree)
        self.stage = stage
        self.bound = bound


class RouteDisagreement(FormalCohError):
    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class ParseError(FormalCohError):
    """Syntax or resolution error; ``line``/``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column
