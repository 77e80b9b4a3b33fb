"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``code`` so the HTTP gateway
can mirror module errors without string matching.
"""


class VowelspellError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class TrialIntegrityError(VowelspellError):
    """Raw trial data violates an invariant (length, positivity, grid)."""

    code = "trial_integrity"


class FilterError(VowelspellError):
    """Series too short, or filter band infeasible."""

    code = "filter"


class PulseDetectionError(VowelspellError):
    """No credible pulse peak above 0.5 Hz."""

    code = "no_pulse"


class WindowError(VowelspellError):
    """Analysis window infeasible for the requested series."""

    code = "window"


class TrainingError(VowelspellError):
    """Calibration input does not satisfy the training protocol."""

    code = "training"


class SchemeError(VowelspellError):
    """Grouping-scheme file is malformed or lookup failed."""

    code = "scheme"


class IncompleteSequenceError(VowelspellError):
    """Answer sequence is a proper prefix; more answers are needed."""

    code = "need_more_answers"

    def __init__(self, message, next_question=None, **context):
        super().__init__(message, **context)
        self.next_question = next_question


class ProtocolError(VowelspellError):
    """An operation was invoked out of protocol order."""

    code = "protocol"


class LexiconError(VowelspellError):
    """Lexicon entry or skeleton is invalid."""

    code = "lexicon"


class PhaseError(VowelspellError):
    """Session operation not allowed in the current phase."""

    code = "phase"


class ReplayError(VowelspellError):
    """Event log cannot be folded into a consistent session state."""

    code = "replay"
