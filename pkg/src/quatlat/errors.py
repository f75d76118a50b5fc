"""Exception hierarchy."""


class QuatlatError(Exception):
    """Base class for all errors raised by the toolkit."""


class IndefiniteAlgebra(QuatlatError):
    pass


class NotClosed(QuatlatError):
    pass


class NoUnit(QuatlatError):
    pass


class NotIntegral(QuatlatError):
    pass


class NotMaximal(QuatlatError):
    pass


class NotPrincipal(QuatlatError):
    pass


class NotEven(QuatlatError):
    pass


class NotIsotropic(QuatlatError):
    pass


class RankUnsupported(QuatlatError):
    pass


class BadPi(QuatlatError):
    pass


class BadLambda(QuatlatError):
    pass


class NoObasis(QuatlatError):
    pass


class GlueNotFound(QuatlatError):
    """No admissible glue subgroup was found; this indicates a bug."""


class EmbeddingNotFound(QuatlatError):
    pass


class CheckFailed(QuatlatError):
    """An internal consistency check failed.

    ``ref`` names the mathematical statement that the failed check enforces.
    """

    def __init__(self, message: str, ref: str = ""):
        super().__init__(message)
        self.ref = ref
