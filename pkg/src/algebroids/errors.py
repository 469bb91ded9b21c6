"""Package-wide error types."""


class InternalConsistencyError(RuntimeError):
    """Two independently computed paths disagreed: a kernel sign bug."""


class DiracClosureError(ValueError):
    """A frame is not bracket-closed; carries the offending residual."""

    def __init__(self, message: str, pair: tuple, residual):
        super().__init__(message)
        self.pair = pair
        self.residual = residual
