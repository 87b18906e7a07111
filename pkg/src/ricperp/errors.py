"""Exception types shared across the package."""


class RicPerpError(Exception):
    """Base class for all errors raised by :mod:`ricperp`."""


class SymmetryViolation(RicPerpError):
    def __init__(self, residual, index, kind="symmetry"):
        self.residual = float(residual)
        self.index = tuple(int(i) for i in index)
        self.kind = kind
        super().__init__(
            f"{kind} violated at index {self.index}: residual {self.residual:.3e}"
        )


class NonFinite(RicPerpError):
    pass


class DimensionMismatch(RicPerpError):
    pass


class SingularMetric(RicPerpError):
    pass


class ZeroVector(RicPerpError):
    pass


class NonUnitaryFrame(RicPerpError):
    pass


class UnsupportedFamilyRank(RicPerpError):
    pass


class OutOfTheoremRange(RicPerpError):
    pass


class LambdaTooSmall(RicPerpError):
    pass


class EmptyGrid(RicPerpError):
    pass


class IndexOutOfRange(RicPerpError):
    pass
