"""Exception types raised across the package."""


class ChirpRipError(Exception):
    """Base class for every error raised by chirprip."""


class NotPrime(ChirpRipError, ValueError):
    pass


class ZeroInverse(ChirpRipError, ZeroDivisionError):
    pass


class ZeroTheta(ChirpRipError, ValueError):
    pass


class ModulusMismatch(ChirpRipError, ValueError):
    pass


class EmptySet(ChirpRipError, ValueError):
    pass


class Overflow(ChirpRipError, OverflowError):
    """An integer encoding would not fit in 63 bits."""


class EmbeddingOverflow(Overflow):
    """The cube embedding is not carry-free modulo p."""


class BranchMisuse(ChirpRipError, ValueError):
    pass


class EqualChirpRate(ChirpRipError, ValueError):
    pass


class DegenerateA(ChirpRipError, ValueError):
    pass


class TooLarge(ChirpRipError, ValueError):
    """A brute-force enumeration exceeds its work budget."""


class CombinatorialBlowup(TooLarge):
    """A subset enumeration exceeds its work budget."""


class OverlappingA(ChirpRipError, ValueError):
    pass


class A1InA2(ChirpRipError, ValueError):
    pass


class TooFewColumns(ChirpRipError, ValueError):
    pass


class InvalidShape(ChirpRipError, ValueError):
    pass
