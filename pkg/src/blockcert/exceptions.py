"""Exception types raised by blockcert."""

import numpy as np


class BlockCertError(Exception):
    """Base class for all blockcert errors."""


class NotHurwitzError(BlockCertError, ValueError):
    """A matrix required to be Hurwitz is not.

    ``abscissa`` holds the offending spectral abscissa and ``block`` the
    (0-based) diagonal block index when the failure is block-local.
    """

    def __init__(self, message, abscissa=None, block=None):
        super().__init__(message)
        self.abscissa = abscissa
        self.block = block


class PartitionError(BlockCertError, ValueError):
    """Partition totals do not match matrix dimensions."""


class RiccatiError(BlockCertError, np.linalg.LinAlgError):
    """No stabilizing Riccati solution could be computed."""


class ComparisonUnstableError(BlockCertError):
    """The comparison system is not Hurwitz.

    This is inconclusive: it does not prove that the original system is
    unstable.
    """

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class DeltaTooSmallError(BlockCertError, ValueError):
    """Requested performance level does not exceed the comparison norm."""


class CertificateError(BlockCertError):
    """A constructed certificate failed numerical verification."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
