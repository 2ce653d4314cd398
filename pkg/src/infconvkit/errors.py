"""Exception hierarchy shared across the package."""


class InputError(ValueError):
    """Malformed input: bad shapes, non-finite entries, bad parameters."""


class DimensionError(InputError):
    pass


class DomainEmptyError(InputError):
    """A region or field domain turned out to be empty."""


class PreconditionError(ValueError):
    """An operation was called outside its stated hypotheses."""
