"""Error types shared across the package.

Every domain error derives from RtkError so the CLI can map them to exit
codes uniformly (CapExceeded -> 3, everything else -> 2).
"""


class RtkError(Exception):
    pass


class EmptySpecification(RtkError):
    pass


class UnknownState(RtkError):
    pass


class Incompatible(RtkError):
    pass


class SpaceMismatch(RtkError):
    pass


class NotEndomorphism(RtkError):
    pass


class CapExceeded(RtkError):
    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class NotOrderEmbedding(RtkError):
    pass


class LumpingOrderViolated(RtkError):
    pass


class NotSubmonoid(RtkError):
    pass


class NotInMonoid(RtkError):
    pass


class NotComplete(RtkError):
    pass


class NotIndependent(RtkError):
    pass


class NotIsomorphism(RtkError):
    pass


class NotInJoin(RtkError):
    pass


class NotSubtheory(RtkError):
    pass


class IncompatibleSideResource(RtkError):
    pass


class EmptyIntersection(RtkError):
    pass


class IncompatibleW(RtkError):
    pass


class InternalInconsistency(RtkError):
    pass


class UnknownIndex(RtkError):
    pass


class NoChainsDeclared(RtkError):
    pass


class BadProbability(RtkError):
    pass


class DimMismatch(RtkError):
    pass


class LengthMismatch(RtkError):
    pass


class TooLarge(RtkError):
    pass


class ParseError(RtkError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class DuplicateName(RtkError):
    pass


class UnknownReference(RtkError):
    pass
