"""Exception types shared across the package."""


class PhotonFqhError(Exception):
    """Base class for all package errors."""


class GeometryError(PhotonFqhError):
    """Invalid lattice dimensions or flux count."""


class BasisError(PhotonFqhError):
    """Occupation state outside the declared manifold/cap."""


class OperatorError(PhotonFqhError):
    """Operator construction on incompatible bases or parameters."""


class SolverError(PhotonFqhError):
    """A linear or eigenvalue solve failed its residual contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AmbiguousMetastableError(PhotonFqhError):
    """Eigensolve found two comparable metastable candidates."""

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates or []


class FillingError(PhotonFqhError):
    """Photon number and flux count violate the half-filling rule."""


class DimensionGuardError(PhotonFqhError):
    """Hilbert-space dimension exceeds the tiny-lattice guard."""


class DegenerateSteadyStateError(PhotonFqhError):
    """Liouvillian null space is not one-dimensional."""


class ConfigError(PhotonFqhError):
    """Run configuration failed validation."""
