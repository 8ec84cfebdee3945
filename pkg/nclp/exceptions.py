"""Exception hierarchy for the toolkit."""


class NclpError(Exception):
    """Base class for every error raised by nclp."""


# matcore

class NotHermitian(NclpError, ValueError):
    """Symmetry residual of an input exceeds the Hermitian tolerance."""


class NotPSD(NclpError, ValueError):
    """A retained eigenvalue is negative beyond tolerance."""


class DomainError(NclpError, ArithmeticError):
    """A scalar function is undefined at a retained eigenvalue."""


class DimMismatch(NclpError, ValueError):
    """Operands do not share a dimension."""


# density

class ZeroTrace(NclpError, ValueError):
    """Cannot normalize a matrix with nonpositive trace."""


class NotNormalized(NclpError, ValueError):
    """A stored density does not have trace one."""


class InvalidParameter(NclpError, ValueError):
    """A scalar parameter is outside its admissible range."""


class InvalidEpsilon(InvalidParameter):
    """Discretization grid parameter must be positive."""


# spaces

class BadExponents(NclpError, ValueError):
    """Exponents violate the ordering an operation requires."""


# schur

class SymbolUndefined(NclpError, ArithmeticError):
    """A multiplier symbol is not finite at some block pair."""


class SymbolAsymmetric(NclpError, ValueError):
    """A symbol declared symmetric is not."""


class NotTriangular(NclpError, ValueError):
    """Input has a nonzero part outside the requested triangle."""


# embedding

class CornerNotAnnihilated(NclpError, ValueError):
    """(1 − e) x (1 − e) is not negligible."""


class ReconstructionFailed(NclpError, ArithmeticError):
    """Left inverse does not recover the input to tolerance."""


class DegenerateBasis(NclpError, ValueError):
    """Subspace basis has a numerically singular Gram matrix."""


# cli / harness

class ConfigInvalid(NclpError, ValueError):
    """An experiment configuration field is invalid."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ReportIOError(NclpError, OSError):
    """Report or reproduction file could not be written."""


class IllConditioned(UserWarning):
    """Weight ratios are large enough that results may lose accuracy."""
