"""Exception taxonomy shared across the package.

Every error raised on purpose derives from :class:`FairPcaError`, so callers
(notably the CLI) can tell deliberate rejections apart from genuine bugs.
"""

from __future__ import annotations


class FairPcaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(FairPcaError):
    """Matrix input is not symmetric, not finite, or otherwise malformed."""


class NumericalFailure(FairPcaError):
    """An iterative numerical routine failed to converge within its budget."""


class DimensionMismatch(FairPcaError):
    """Shapes of the supplied arrays are inconsistent."""


class PreconditionViolated(FairPcaError):
    """A documented precondition of an operation does not hold."""


class NotPositiveSemidefinite(FairPcaError):
    """Matrix has an eigenvalue below the allowed tolerance."""


class DegenerateProtectedClass(FairPcaError):
    """A protected class is empty or too small for the requested operation."""


class InvalidDimension(FairPcaError):
    """Target dimension d is out of the valid range."""


class ConfigurationError(FairPcaError):
    """Configuration object or file is inconsistent or incomplete."""


class InvalidKernel(FairPcaError):
    """Kernel specification is unknown or the Gram matrix is not PSD."""


class DegenerateVariance(FairPcaError):
    """A projected group variance is not strictly positive."""


class DegenerateLabels(FairPcaError):
    """Label vector contains fewer than two classes."""


class InvalidArgument(FairPcaError):
    """Scalar argument outside its documented range."""


class EmptyCluster(FairPcaError):
    """A cluster ended up with no members."""


class SchemaError(FairPcaError):
    """CSV schema does not match the dataset description."""


class EmptyDataset(FairPcaError):
    """No usable rows remain after loading and filtering."""


class DegenerateFeatures(FairPcaError):
    """All feature columns are constant; nothing to normalize."""


class StratificationError(FairPcaError):
    """A protected class is too small to stratify the requested split."""


class TieWarning(UserWarning):
    """Eigenvalue tie at the cut made the component choice convention-bound."""
