"""
Errors raised by polefinder.

Every error is a ``ValueError`` so callers that only know about bad input keep
working; ``exit_code`` is what the command line returns when the error reaches
the top level.
"""


class PoleFinderError(ValueError):
    exit_code = 1


class ConfigError(PoleFinderError):
    exit_code = 2


class NonFiniteInput(PoleFinderError):
    exit_code = 2


class DomainError(PoleFinderError):
    exit_code = 2


class NotEmbeddable(PoleFinderError):
    exit_code = 3


class SeriesTooShort(PoleFinderError):
    exit_code = 4


class BandwidthTooLarge(PoleFinderError):
    exit_code = 2


class DegenerateBand(PoleFinderError):
    exit_code = 5


class QuadratureFailure(PoleFinderError):
    pass


class WeightNotCentered(PoleFinderError):
    exit_code = 2


class AlphaNonPositive(PoleFinderError):
    pass
