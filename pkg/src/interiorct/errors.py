"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """A parameter or input violates a documented constraint."""


class IllPosedError(ValueError):
    """An analytic route was requested on data for which it is ill-posed.

    Raised e.g. when BPF inversion is attempted on truncated projections;
    interior reconstruction needs a prior (see the TV solver) or full data.
    """


class DivergenceError(RuntimeError):
    """An iterative solver diverged.  Carries the last iterate."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate
