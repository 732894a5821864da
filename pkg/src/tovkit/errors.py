"""Exception types shared across the package.

The command line maps these onto its exit-code discipline: domain /
validation errors exit 2, physical no-solution outcomes exit 3, and
numerical failures exit 4.
"""


class TovkitError(Exception):
    """Base class for all package-specific errors."""


class DomainError(TovkitError, ValueError):
    """An input value lies outside the operation's domain."""


class UnknownUnitError(DomainError):
    """Unit tag is not one of the supported conversions."""


class OutOfBranchError(DomainError):
    """No nonnegative density corresponds to the requested pressure."""


class UnderdeterminedError(TovkitError, ValueError):
    """A fit lacks the independent data needed to pin its parameters."""


class CatalogError(TovkitError, ValueError):
    """Catalog input failed validation; the message carries the row number."""


class NoFiniteRadiusError(TovkitError):
    """The configuration has no finite surface radius (index n >= 5)."""


class HorizonApproachError(TovkitError):
    """Integration drove 2M(r)/r toward 1 before a surface formed."""


class NonConvergenceError(TovkitError):
    """An iterative routine exhausted its budget without converging."""


class SingularPointError(TovkitError):
    """Evaluation was requested at a pole of a rational relation."""


class FoldPointError(TovkitError):
    """The relation is not locally invertible (dR/dM vanishes)."""


class InversionError(NonConvergenceError):
    """Mass inversion failed to locate a root near the seed."""
