"""Exception hierarchy shared by all netred modules."""


class NetredError(Exception):
    """Base class for every error raised by netred."""


class PoleAtPoint(NetredError):
    """A rational function was evaluated at (or numerically at) one of its poles."""


class ZeroFunction(NetredError):
    """An operation needed a nonzero rational function and got the zero function."""


class AsymmetricInput(NetredError):
    pass


class NotSymmetric(NetredError):
    pass


class NotUnit(NetredError):
    pass


class OrderingViolated(NetredError):
    """Closed-form block spectrum requested with alpha < beta."""


class SingularInterior(NetredError):
    """Kron reduction hit a singular interior block (eliminated nodes cut off from kept ones)."""


class DegenerateRegime(NetredError):
    """Random-graph bounds requested outside p > q."""


class SizeMismatch(NetredError):
    pass


class SingularAtPoint(NetredError):
    """The network return-difference matrix is singular at the requested frequency."""


class SingularH2(NetredError):
    """The 2x2 projected matrix is singular; s0 is a pole of the rank-two approximant."""


class DegeneratePartition(NetredError):
    """Spectral clustering produced an empty group."""


class ImproperTransferFunction(NetredError):
    pass


class AlgebraicLoop(NetredError):
    pass


class UnstableDivergence(NetredError):
    """Simulated output left the bounded region; the model is unstable or dt too large."""


class InvalidConfig(NetredError):
    """A configuration or model file failed validation."""
