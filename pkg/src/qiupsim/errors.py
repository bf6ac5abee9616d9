"""Exception types shared across the simulator."""


class QiupError(Exception):
    """Base class for all simulator errors."""


class TruncationError(QiupError):
    """Kernel grid too small: boundary values are not negligible."""


class ParaxialError(QiupError):
    """Ray slope exceeds the paraxial validity bound of the lens model."""


class NoSolution(QiupError):
    """Momentum matching failed: the arm map is singular."""


class DomainError(QiupError):
    """QMC integration domain does not cover enough of the kernel mass."""


class DimensionMismatch(QiupError):
    """Grids with incompatible shapes."""


class PhaseObjectError(QiupError):
    """Shift-invariant convolution requested for a mask with nonzero phase."""


class UnsupportedMisalignment(QiupError):
    """Misalignment cannot be expressed as a pure phase perturbation."""


class KernelMismatch(QiupError):
    """Deconvolution kernel is larger than the image."""


class FeatureNotFound(QiupError):
    """Slit maxima/minima could not be located in a visibility cut."""


class NoBracket(QiupError):
    """Resolution-limit search bracket does not straddle the threshold."""


class SchemaError(QiupError):
    """Configuration document violates the schema. Carries the key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class PhysicsError(QiupError):
    """Configuration is schema-valid but physically meaningless."""


class ParseError(QiupError):
    """File could not be parsed (PGM/CSV)."""


class RangeError(QiupError):
    """Pixel values outside the encoding range."""
