class KDToolkitError(ValueError):
    """Base class for every rejected input or violated invariant."""


class NonFiniteValue(KDToolkitError):
    pass


class NotHermitian(KDToolkitError):
    pass


class TraceNotOne(KDToolkitError):
    pass


class NotPSD(KDToolkitError):
    pass


class NotNormalized(KDToolkitError):
    pass


class NotOrthonormal(KDToolkitError):
    pass


class NotUnitary(KDToolkitError):
    pass


class DimensionMismatch(KDToolkitError):
    pass


class DecompositionMismatch(KDToolkitError):
    pass


class ConvergenceFailure(KDToolkitError):
    pass


class ChainTooShort(KDToolkitError):
    pass


class ZeroOverlap(KDToolkitError):
    def __init__(self, i: int, j: int, magnitude: float, floor: float):
        self.i = i
        self.j = j
        super().__init__(
            f"|<f_{j}|a_{i}>| = {magnitude:.3e} is below the overlap floor {floor:.1e}"
        )


class MarginalNotReal(KDToolkitError):
    pass


class InsufficientMoments(KDToolkitError):
    pass


class InvalidParameter(KDToolkitError):
    pass


class NotMUB(KDToolkitError):
    pass


class DegenerateSpectrum(KDToolkitError):
    pass


class InvalidBlochParameters(KDToolkitError):
    pass


class ParameterOutOfRange(KDToolkitError):
    pass


class SchemaError(KDToolkitError):
    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")
