"""Exception hierarchy shared by all modules."""


class GameError(Exception):
    """Base class for every error raised by gamefl."""


class EqualRuns(GameError):
    pass


class DuplicateRun(GameError):
    pass


class BadAliceIndex(GameError):
    pass


class NonCanonicalRunSpec(GameError):
    pass


class EmptyGame(GameError):
    pass


class NotChronological(GameError):
    pass


class MomentNotInTree(GameError):
    pass


class SourceTargetMismatch(GameError):
    pass


class TargetMismatch(GameError):
    pass


class NotEmbedding(GameError):
    pass


class UnstableWindow(GameError):
    pass


class NotInPayoff(GameError):
    pass


class SameClass(GameError):
    pass


class NotSubgame(GameError):
    pass


class InvalidEmbedding(GameError):
    pass


class WindowTooSmall(GameError):
    pass


class NotNatural(GameError):
    pass


class RunIsAlice(GameError):
    pass


class TooFewBranches(GameError):
    pass


class NotTrivialForAlice(GameError):
    pass


class NotUltrametric(GameError):
    pass


class RangeOutsideS(GameError):
    pass


class DepthInsufficient(GameError):
    pass
