"""Exception types raised across shadowlab.

Every error carries a short machine-readable ``code`` so the CLI can report
failures without parsing messages.
"""


class ShadowlabError(Exception):
    code = "error"


class InvalidAlphabet(ShadowlabError, ValueError):
    code = "invalid-alphabet"


class EmptySystem(ShadowlabError, ValueError):
    code = "empty-system"


class InvalidHomeo(ShadowlabError, ValueError):
    code = "invalid-homeo"


class InvalidPoint(ShadowlabError, ValueError):
    code = "invalid-point"


class HorizonExhausted(ShadowlabError):
    code = "horizon-exhausted"


class InsufficientEvidence(ShadowlabError, ValueError):
    code = "insufficient-evidence"


class EmptyPool(ShadowlabError, ValueError):
    code = "empty-pool"


class SamplerError(ShadowlabError):
    code = "sampler-error"


class NotACover(ShadowlabError, ValueError):
    code = "not-a-cover"


class ShapeError(ShadowlabError, ValueError):
    code = "shape-error"


class ModulusViolation(ShadowlabError, ValueError):
    code = "modulus-violation"


class TracerInternalError(ShadowlabError):
    code = "internal-error"


class NoShadowFound(ShadowlabError):
    code = "no-shadow-found"

    def __init__(self, message, best_point=None, best_deviation=None):
        super().__init__(message)
        self.best_point = best_point
        self.best_deviation = best_deviation


class ToleranceTooTight(ShadowlabError, ValueError):
    code = "tolerance-too-tight"


class JunctionViolation(ShadowlabError):
    code = "junction-violation"

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class DepthTooLarge(ShadowlabError, ValueError):
    code = "depth-too-large"


class EntropyDeficit(ShadowlabError, ValueError):
    code = "entropy-deficit"


class InvalidSlack(ShadowlabError, ValueError):
    code = "invalid-slack"


class EmptyCore(ShadowlabError, ValueError):
    code = "empty-core"


class RangeError(ShadowlabError, ValueError):
    code = "range-error"


class CannotCertify(ShadowlabError):
    code = "cannot-certify"


class ContinuityBudgetExceeded(ShadowlabError):
    code = "continuity-budget-exceeded"


class InvalidSequence(ShadowlabError, ValueError):
    code = "invalid-sequence"


class ConfigError(ShadowlabError, ValueError):
    code = "usage-error"


class ReplayRefused(ShadowlabError):
    code = "replay-refused"
