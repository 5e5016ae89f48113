"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
anything else is allowed to surface as a plain ValueError/OSError from the
underlying libraries.
"""


class OscintError(Exception):
    """Base class for all package-specific errors."""


# quadrature
class InvalidDomain(OscintError):
    pass


class SimpsonOddCount(OscintError):
    pass


class LengthMismatch(OscintError):
    pass


class ZeroError(OscintError):
    """Both refinement errors underflowed; no order can be estimated."""


# integrands
class OutOfDomain(OscintError):
    pass


class ParamOutOfSpace(OscintError):
    pass


class StiffnessFailure(OscintError):
    """Adaptive step size underflowed; carries the failure time."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class NonPositiveRadius(OscintError):
    """Bubble radius hit zero during integration; carries the crossing time."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


# dataset
class TruthNotConverged(OscintError):
    pass


class EmptySplit(OscintError):
    pass


class MalformedFile(OscintError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaMismatch(OscintError):
    pass


# mlp
class ShapeMismatch(OscintError):
    pass


class DivergedLoss(OscintError):
    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class VersionMismatch(OscintError):
    pass


class CorruptModel(OscintError):
    pass


# metrics
class EmptyInput(OscintError):
    pass


class TargetUnreachable(OscintError):
    pass


# harness
class NoFeasibleArch(OscintError):
    pass


class IoFailure(OscintError):
    pass
