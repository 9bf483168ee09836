"""Exception hierarchy shared by all gcohom modules."""


class GcohomError(Exception):
    """Base class for every error raised by the package."""


class ModulusMismatch(GcohomError, ValueError):
    pass


class DimensionMismatch(GcohomError, ValueError):
    pass


class CapExceeded(GcohomError, RuntimeError):
    """A configured size cap (order, dimension, degree) would be exceeded."""


class GroupError(GcohomError, ValueError):
    pass


class ModuleError(GcohomError, ValueError):
    """Invalid module data: bad matrices, relation violations, group mismatch."""


class NotExact(GcohomError, ValueError):
    """Input maps do not form a short exact sequence of modules."""


class IncompatibleFamily(GcohomError, ValueError):
    """A local cochain family violates the restriction compatibility."""


class NotACocycle(GcohomError, ValueError):
    pass


class NotACycle(GcohomError, ValueError):
    pass


class InternalInconsistency(GcohomError, AssertionError):
    """A mathematically guaranteed identity failed; this signals a bug."""
