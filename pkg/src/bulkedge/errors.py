"""Exception types raised by the library.

Every error derives from :class:`BulkEdgeError` so callers can catch the whole
family; most also derive from ``ValueError`` since they signal bad inputs.
"""


class BulkEdgeError(Exception):
    """Base class for all library errors."""


class ParameterError(BulkEdgeError, ValueError):
    """A model, domain or shape parameter is out of range."""


class GeometryError(BulkEdgeError, ValueError):
    """The torus window is too small for the requested construction."""


class ContractViolation(BulkEdgeError, ValueError):
    """An input violates a documented contract (e.g. a non-Hermitian matrix)."""


class DegenerateCutError(BulkEdgeError, ValueError):
    """A spectral cut was requested at (or numerically on) an eigenvalue."""


class SingularityError(BulkEdgeError, ArithmeticError):
    """A symbol is singular, or a gap closes, on the sampled momentum grid."""


class GapError(BulkEdgeError, ValueError):
    """A spectral-gap precondition does not hold."""


class PreconditionError(BulkEdgeError, ValueError):
    """A hypothesis of an estimate failed the entrywise scan."""


class HypothesisError(PreconditionError):
    """The hypotheses of a kernel or resolvent estimate do not hold."""


class PrecisionError(BulkEdgeError, ValueError):
    """A lattice-sum cutoff is too small to certify the truncation error."""
