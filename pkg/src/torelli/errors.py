"""Exception hierarchy.

Every domain error derives from :class:`TorelliError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class TorelliError(ValueError):
    pass


class DegenerateTuple(TorelliError):
    pass


class ExhaustedSampleSpace(TorelliError):
    pass


class IdenticalPoints(TorelliError):
    pass


class AmbientMismatch(TorelliError):
    pass


class LengthMismatch(TorelliError):
    pass


class DegreeMismatch(TorelliError):
    pass


class MalformedInput(TorelliError):
    pass


class OutOfRange(TorelliError):
    pass


class RepeatedEntry(TorelliError):
    pass


class DegreeTooLarge(TorelliError):
    pass


class NotAGroupElement(TorelliError):
    pass


class MissingProvenance(TorelliError):
    pass


class BudgetExhausted(TorelliError):
    """Witness search ran out of attempts. Says nothing about existence."""


class NoExtension(TorelliError):
    pass


class TargetLargerThanSource(TorelliError):
    pass


class LiftVerificationFailed(TorelliError):
    pass
