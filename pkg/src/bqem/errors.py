"""Exception types shared across the library."""


class BqemError(Exception):
    """Base class for all library-specific errors."""


class OriginSingularity(BqemError):
    """A kernel was evaluated at (or too close to) its singular point."""


class InadmissibleAlpha(BqemError):
    """The wavenumber has negative imaginary part; the kernel would grow at infinity."""


class ChiralResonance(BqemError):
    """1 + alpha*beta or 1 - alpha*beta vanishes; the split wavenumbers blow up."""


class GridTooSmall(BqemError):
    """The lattice has too few nodes to apply a central stencil with the required margin."""


class LatticeMismatch(BqemError):
    """Two grids that must share a lattice do not."""


class VanishingF(BqemError):
    """The particular solution f drops below the division-safety tolerance."""


class BaseOutOfGrid(BqemError):
    """The antiderivative base node is outside the valid interior of the grid."""


class DegenerateSample(BqemError):
    """A surface sample landed on a parametrization pole with no tangent frame."""


class SourceOnBoundary(BqemError):
    """A fundamental-solution source point coincides with an evaluation point."""


class SourceSingularity(BqemError):
    """A field evaluation point coincides with one of the solution's source points."""


class SingularMatrix(BqemError):
    """LU elimination met a pivot below the relative tolerance."""


class NonPositiveMedium(BqemError):
    """Permittivity or permeability is not strictly positive on the grid."""


class ArgumentOutOfRange(BqemError):
    """Argument outside the validated range of a series evaluation."""


class AchiralUnsupported(BqemError):
    """The chiral Green function is not defined for beta = 0."""


class ConfigError(BqemError):
    """An experiment configuration is missing or has an ill-typed field."""
