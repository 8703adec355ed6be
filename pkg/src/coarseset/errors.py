"""Exception types raised by the coarseset engine.

Everything derives from CoarsesetError so callers (and the CLI) can treat
"bad input" uniformly; most subclasses also inherit ValueError or OSError
for interoperability with generic handling.
"""


class CoarsesetError(Exception):
    """Base class for all engine errors."""


# --- file format / data validation -----------------------------------------

class MalformedHeader(CoarsesetError, ValueError):
    """Bad magic bytes, version, dtype, reserved field, or unparseable file."""


class SizeMismatch(CoarsesetError, ValueError):
    """Payload length disagrees with the declared n*d (or a ragged CSV row)."""


class NonFiniteValue(CoarsesetError, ValueError):
    """NaN or infinity found in embedding data."""


class EmptyMatrix(CoarsesetError, ValueError):
    """Embedding matrix with n=0 or d=0."""


class MalformedLabel(CoarsesetError, ValueError):
    """Label is not a non-negative integer, or exceeds a declared class count."""


class EmptyFile(CoarsesetError, ValueError):
    """Label file contains no entries."""


class IoFailure(CoarsesetError, OSError):
    """Underlying read/write failed."""


# --- metrics ----------------------------------------------------------------

class DimensionMismatch(CoarsesetError, ValueError):
    """Vectors or matrices with incompatible dimensions."""


class ZeroVector(CoarsesetError, ValueError):
    """Cosine distance requested for an all-zero vector."""


# --- selection --------------------------------------------------------------

class BudgetExceedsPool(CoarsesetError, ValueError):
    """Requested more points than remain unselected."""


class DuplicateSeed(CoarsesetError, ValueError):
    """Initial center list contains a repeated index."""


class IndexOutOfRange(CoarsesetError, ValueError):
    """Point index outside [0, n)."""


class NoCenters(CoarsesetError, ValueError):
    """Coverage radius requested before any center exists."""


class BudgetExceedsOrder(CoarsesetError, ValueError):
    """Histogram budget larger than the selection order."""


# --- proxy model ------------------------------------------------------------

class EmptySubset(CoarsesetError, ValueError):
    """Training subset is empty."""


class LabelOutOfRange(CoarsesetError, ValueError):
    """Label id not below the model's class count."""


class EmptyEvalSet(CoarsesetError, ValueError):
    """Accuracy requested over an empty evaluation set."""


class TrainerFailure(CoarsesetError):
    """Feature trainer raised, or returned a malformed feature matrix."""


# --- harness ----------------------------------------------------------------

class ScheduleExceedsPool(CoarsesetError, ValueError):
    """A sweep budget exceeds the training pool size."""
