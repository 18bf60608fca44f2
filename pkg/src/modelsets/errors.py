"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument or incompatible scheme/window combination."""


class ResourceError(RuntimeError):
    """Requested computation exceeds the configured memory/size budget."""


class DegenerateInputError(ValueError):
    """Input data carries no usable information (e.g. all spectra below threshold)."""


class ReconstructionError(RuntimeError):
    """Window recovery failed; carries the partial indicator grid if available."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
