"""Exception hierarchy shared by every module of the package."""


class HitsRankError(Exception):
    """Base class for all package errors."""


class ConstraintViolation(HitsRankError, ValueError):
    """A construction parameter failed one of its admissibility constraints."""

    def __init__(self, name, detail=""):
        self.name = name
        msg = f"constraint violated: {name}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidParameter(HitsRankError, ValueError):
    pass


class ParseError(HitsRankError, ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class DigitCapExceeded(HitsRankError, RuntimeError):
    """The exact engine would exceed its configured digit or step cap."""


class DegenerateScoreVector(HitsRankError, ArithmeticError):
    pass


class NotSymmetric(HitsRankError, ValueError):
    pass


class AmbiguousDominance(HitsRankError, ArithmeticError):
    """Two components have Perron eigenvalues too close to separate numerically."""

    def __init__(self, message, eigenvalues=None):
        self.eigenvalues = eigenvalues
        super().__init__(message)


class HorizonTooShort(HitsRankError, ValueError):
    pass


class NotGammaGraph(HitsRankError, ValueError):
    pass
