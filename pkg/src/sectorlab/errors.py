"""Exception hierarchy shared by every module."""


class SectorLabError(Exception):
    """Base class for all errors raised by sectorlab."""


class InputError(SectorLabError, ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class DimensionMismatch(InputError):
    pass


class MismatchedAlgebra(InputError):
    """Two representations do not belong to the same abstract algebra."""


class InvalidState(InputError):
    pass


class NotFaithful(InputError):
    """A state vanishes on some sector where faithfulness is required."""


class NotSubalgebra(InputError):
    pass


class NotCommutative(InputError):
    pass


class NotMaximal(InputError):
    """The abelian subalgebra has a degenerate joint spectrum."""


class NotInAlgebra(InputError):
    pass


class NoOutcome(SectorLabError):
    """An outcome set has probability below tolerance; no post-measurement state."""


class InvalidAction(InputError):
    pass


class NotStandard(InputError):
    pass


class SchemaError(InputError):
    """A spec file failed validation; ``path`` names the offending field."""

    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path) or "<root>"
        super().__init__(f"{where}: {message}")


class NumericalError(SectorLabError, ArithmeticError):
    """A rank or spectral decision was unstable at the working tolerance."""
