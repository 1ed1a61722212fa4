import numpy as np


class UnsupportedConfigurationError(ValueError):
    """Raised when a requested stream count exceeds what the channel can carry."""


class SingularSystemError(np.linalg.LinAlgError):
    """A linear system was numerically singular.

    ``cond`` holds the 2-norm condition number estimate of the offending matrix.
    """

    def __init__(self, message, cond=np.inf):
        super().__init__(f"{message} (condition number {cond:.3e})")
        self.cond = cond
