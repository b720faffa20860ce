class InvalidInputError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    """All Y values are equal, so the rank correlation is undefined."""


class DegeneracyExhaustedError(RuntimeError):
    """A bootstrap replicate could not find a valid subsample within the retry cap."""


class ConfigMismatchError(ValueError):
    pass
