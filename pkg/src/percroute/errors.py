"""Exception hierarchy. CLI exit codes hang off these classes."""


class PercrouteError(Exception):
    """Base class for all package errors."""


class ConfigError(PercrouteError, ValueError):
    """Malformed topology, sweep or router configuration."""


class EncodingError(ConfigError):
    """A vertex or edge code (or label) does not belong to the topology."""


class FamilyError(ConfigError):
    """Operation not defined for this graph family."""


class CapacityError(PercrouteError):
    """Topology too large for exhaustive enumeration."""


class LocalityError(PercrouteError):
    """A local router probed an edge with no endpoint reached from the source."""


class InsufficientDataError(PercrouteError):
    """No conditioned trials to estimate from."""


class FitError(PercrouteError, ValueError):
    """Degenerate data passed to a scaling fit."""
