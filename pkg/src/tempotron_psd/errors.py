"""Exception types raised across the package.

Everything derives from :class:`TempotronError` so callers can catch one
base class. The CLI maps these onto exit codes: config problems -> 2,
I/O problems -> 3, domain preconditions -> 4.
"""


class TempotronError(Exception):
    """Base class for all errors raised by this package."""


# --- pulse data -------------------------------------------------------------

class AllZeroPulse(TempotronError):
    """Pulse has no strictly positive sample after baseline subtraction."""


class InvalidConfig(TempotronError):
    """A configuration object violates its invariants."""


class ParseError(TempotronError):
    """A dataset file field failed to parse; message reports row/column."""


class RaggedRows(TempotronError):
    """Dataset file rows have inconsistent widths."""


class BadLabel(TempotronError):
    """Label column value is not 0 or 1."""


# --- encoding ---------------------------------------------------------------

class NotNormalized(TempotronError):
    """Pulse samples fall outside the [0, 1] range expected by the encoder."""


# --- neuron -----------------------------------------------------------------

class BadTimeConstants(TempotronError):
    """Membrane time constant must exceed the synaptic time constant."""


class DendriteMismatch(TempotronError):
    """Spike pattern dendrite count differs from the model's efficacy count."""


# --- learning ---------------------------------------------------------------

class LengthMismatch(TempotronError):
    """Two vectors that must have equal length do not."""


class UnlabeledDataset(TempotronError):
    """Training requires ground-truth labels."""


class SingleClassDataset(TempotronError):
    """Training requires at least one pulse of each class."""


class NotLogged(TempotronError):
    """Requested diagnostic was not recorded during training."""


# --- baselines --------------------------------------------------------------

class GateOutOfRange(TempotronError):
    """An integration gate extends beyond the pulse."""


class PeakNotFound(TempotronError):
    """Pulse has no usable peak."""


class DegenerateRange(TempotronError):
    """Histogram input has zero spread."""


class Unimodal(TempotronError):
    """No valley between two modes; an explicit threshold is required."""


class SingleClass(TempotronError):
    """Figure of merit needs samples from both classes."""


# --- metrics ----------------------------------------------------------------

class Empty(TempotronError):
    """Operation requires at least one element."""
