"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A parameter or argument violates its documented domain."""


class DegenerateQuantizerError(ValueError):
    """Quantizer thresholds cannot be fitted (e.g. constant input)."""


class InsufficientDataError(ValueError):
    """A statistical test was given fewer bits than it requires."""

    def __init__(self, test: str, n: int, minimum: int):
        self.test = test
        self.n = n
        self.minimum = minimum
        super().__init__(f"{test} needs at least {minimum} bits, got {n}")
