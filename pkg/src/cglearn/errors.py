"""Exception hierarchy shared by all modules."""


class CGLearnError(Exception):
    """Base class for errors raised by this package."""


class InvalidGraphError(CGLearnError):
    """The edge sets do not describe a valid graph of the requested kind."""


class InvalidQueryError(CGLearnError):
    """A separation or independence query has overlapping or empty arguments."""


class DegenerateDataError(CGLearnError):
    """Data cannot support the requested statistic (zero variance, singular matrix)."""


class InsufficientSamplesError(CGLearnError):
    """Too few samples for the size of the conditioning set."""


class ConfigError(CGLearnError):
    """Invalid generator, sampler or grid configuration."""
