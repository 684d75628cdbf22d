"""Exception hierarchy shared by every module."""


class AQCError(Exception):
    """Base class for all errors raised by this package."""


class ConstraintError(AQCError):
    """Runtime size/resource limit hit (CLI exit code 2)."""


class EmptySequence(AQCError, ValueError):
    pass


class OddLength(AQCError, ValueError):
    pass


class LabelCountError(AQCError, ValueError):
    pass


class InvalidMatching(AQCError, ValueError):
    pass


class SizeMismatch(AQCError, ValueError):
    pass


class TooSmall(AQCError, ValueError):
    pass


class OverlapError(AQCError, ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"pair {pair} occurs in both matchings")


class LengthMismatch(AQCError, ValueError):
    pass


class RetryExhausted(ConstraintError):
    pass


class TooLarge(ConstraintError):
    pass
