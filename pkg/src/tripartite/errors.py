"""Exception types raised across the toolkit."""


class TripartiteError(ValueError):
    """Base class for every error raised by this package."""


class NonHermitian(TripartiteError):
    pass


class NoConvergence(TripartiteError, ArithmeticError):
    pass


class NotPsd(TripartiteError):
    pass


class DimensionMismatch(TripartiteError):
    pass


class NotNormalizable(TripartiteError):
    pass


class BadPartyCount(TripartiteError):
    pass


class BadRange(TripartiteError):
    """A canonical-form or POVM parameter lies outside its allowed interval."""


class BadSubset(TripartiteError):
    pass


class BadDimension(TripartiteError):
    pass


class BadDims(TripartiteError):
    pass


class OutOfRange(TripartiteError):
    pass


class Inconclusive(TripartiteError):
    """A quantity fell inside a tolerance guard band; tighten the tolerances."""


class DegenerateRange(TripartiteError):
    pass


class NotGhzClass(TripartiteError):
    pass


class NotWClass(TripartiteError):
    pass


class Annihilated(TripartiteError):
    """A local operator mapped the state to (numerically) zero."""


class NotEntangled(TripartiteError):
    pass


class IncompletePovm(TripartiteError):
    pass


class ParseError(TripartiteError):
    pass
