"""Typed errors raised by the boundary-condition toolkit."""


class CurvibcError(Exception):
    """Base class for all domain errors."""


class SingularMapping(CurvibcError):
    pass


class UnknownMapping(CurvibcError):
    pass


class DimensionalModeUnsupported(CurvibcError):
    pass


class InternalInconsistency(CurvibcError):
    """Two independent constructions of the same quantity disagree."""


class SonicDegenerate(CurvibcError):
    pass


class CriticalStreamwise(CurvibcError):
    pass


class DegeneratePrefactor(CurvibcError):
    pass


class ZeroAlphaVector(CurvibcError):
    pass


class DegenerateNormalization(CurvibcError):
    pass


class NonOrthogonalGrid(CurvibcError):
    pass


class DegenerateDenominator(CurvibcError):
    pass


class Instability(CurvibcError):
    pass


class SingularClosure(CurvibcError):
    pass


class NoSignal(CurvibcError):
    pass


class ConfigError(CurvibcError):
    """Invalid or unknown configuration fields."""
