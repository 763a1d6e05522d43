"""Exception types shared across the package."""


class LalrError(Exception):
    """Base class for every error raised by lalrnet."""


class ShapeError(LalrError, ValueError):
    pass


class ParameterError(LalrError, ValueError):
    pass


class DomainError(ParameterError):
    """Input lies outside the region where an activation is real-valued."""


class DegenerateConstantError(LalrError, ArithmeticError):
    """The Lipschitz constant evaluated to zero, so no rate can be derived."""


class ContractError(LalrError):
    """A forward cache was used with a network it was not produced by."""


class ParseError(LalrError, ValueError):
    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class SchemaError(LalrError, ValueError):
    pass


class RunError(LalrError):
    """Wraps an error raised inside the training loop with its position."""

    def __init__(self, cause, subsample, epoch, iteration=None):
        where = f"subsample {subsample}, epoch {epoch}"
        if iteration is not None:
            where += f", iteration {iteration}"
        super().__init__(f"{where}: {type(cause).__name__}: {cause}")
        self.cause = cause
        self.subsample = subsample
        self.epoch = epoch
        self.iteration = iteration
