"""Exception types shared across the package."""


class ReachIntentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(ReachIntentError, ValueError):
    """An argument violates a structural contract (shape, range, units)."""


class PreconditionError(ReachIntentError, ValueError):
    """A call was made in a state or with inputs the operation excludes."""


class ParameterError(ReachIntentError, ValueError):
    """A model parameter set violates one of its feasibility constraints."""


class StreamError(ReachIntentError, ValueError):
    """An observation stream broke its ordering contract."""


class UndefinedPoseError(ReachIntentError, ValueError):
    """A hand skeleton is too degenerate to extract joint angles from."""


class InconsistencyError(ReachIntentError, RuntimeError):
    """Internal state references an entity that no longer exists."""


class ScenarioFormatError(ReachIntentError, ValueError):
    """A scenario or observation file is malformed or has a bad schema."""
