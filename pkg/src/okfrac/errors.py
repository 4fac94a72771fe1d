"""Exception types shared across the package."""


class OkfracError(Exception):
    """Base class for all package errors."""


class InvalidInstance(OkfracError):
    """Instance data violates a structural requirement (empty, bad sizes, duplicate ids)."""


class KeyMismatch(OkfracError):
    """A packing or query refers to an item id the instance does not contain."""


class InvalidPermutation(OkfracError):
    """Arrival order is not a bijection on the instance's item ids."""


class DuplicateItem(OkfracError):
    """An item id was inserted twice into an incremental solver."""


class DomainError(OkfracError):
    """A bound function was evaluated outside its mathematical domain."""


class AlternatingSumUnstable(OkfracError):
    """Float evaluation of the alternating binomial sum would lose all precision."""


class ConvergenceFailure(OkfracError):
    """A root or maximum search failed to bracket or converge."""


class DegenerateInstance(OkfracError):
    """The instance admits no meaningful competitive ratio (offline optimum is zero)."""


class InvalidSpec(OkfracError):
    """Generator specification is internally inconsistent."""
