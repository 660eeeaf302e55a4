"""Exception hierarchy.

Input errors (bad files, bad arguments, inconsistent cohorts) and
computation errors (degenerate matrices, failed embeddings) are kept
apart so the command line can map them to different exit codes.
"""


class MpRadiomicsError(Exception):
    """Base class for all package errors."""


class InputError(MpRadiomicsError, ValueError):
    """Raised when inputs violate a documented precondition."""


class ComputationError(MpRadiomicsError, RuntimeError):
    """Raised when a well-formed input leads to a degenerate computation."""


class EmptyMaskError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class SingleClassError(InputError):
    pass


class EmptyTscmError(ComputationError):
    """No voxel pair satisfied the distance/angle constraint inside the ROI."""
