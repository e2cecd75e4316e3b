"""Exception types. All derive from ValueError so callers can catch broadly."""


class RecurFracError(ValueError):
    pass


class BadRatio(RecurFracError):
    pass


class NotSorted(RecurFracError):
    pass


class SeparationViolated(RecurFracError):
    pass


class SymbolOutOfRange(RecurFracError):
    pass


class EmptyWord(RecurFracError):
    pass


class EmptyPeriod(RecurFracError):
    pass


class GapPoint(RecurFracError):
    """The point falls in a gap of the construction at ``level``, so it is not in K."""

    def __init__(self, level: int, x=None):
        self.level = level
        self.x = x
        super().__init__(f"point {x} lies in a gap at level {level}")


class DepthExhausted(RecurFracError):
    pass


class NonpositiveRadius(RecurFracError):
    pass


class NonpositiveRate(RecurFracError):
    pass


class BadRange(RecurFracError):
    pass


class LevelTooLarge(RecurFracError):
    pass


class EmptyBall(RecurFracError):
    pass


class UnknownFamily(RecurFracError):
    pass


class MonotonicityViolated(RecurFracError):
    pass


class HorizonRequired(RecurFracError):
    pass


class NegativeB(RecurFracError):
    pass


class NoRoot(RecurFracError):
    pass


class CriticalComparison(RecurFracError):
    """A numeric sign test landed inside the precision margin."""
