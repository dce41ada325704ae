"""Exception hierarchy shared by all tradenet modules."""


class TradenetError(Exception):
    """Base class for every error raised by this package."""


class DegenerateSpec(TradenetError, ValueError):
    """A network specification cannot produce a valid graph."""


class GenerationFailed(TradenetError, RuntimeError):
    """No connected graph was found within the retry budget."""


class Disconnected(TradenetError, ValueError):
    """The operation needs a connected graph (or a connected S-D pair)."""


class GraphFormatError(TradenetError, ValueError):
    """A graph file could not be parsed."""


class NotIntermediary(TradenetError, ValueError):
    """A node-level measure was requested for the source or destination."""


class PathExplosion(TradenetError, RuntimeError):
    """Simple-path enumeration exceeded its cap."""

    def __init__(self, cap):
        super().__init__(f"more than {cap} simple S-D paths; instance too large for enumeration")
        self.cap = cap


class EmptySample(TradenetError, ValueError):
    """Bootstrap initialization was requested without sample values."""


class TooShort(TradenetError, ValueError):
    """A series log has too few rounds for the requested statistic."""


class EmptyLog(TradenetError, ValueError):
    """Summary statistics were requested for no data."""


class NoEligiblePair(TradenetError, ValueError):
    """No source-destination pair satisfies the distance rule."""


class ConfigError(TradenetError, ValueError):
    """An experiment configuration is malformed."""


class RankDeficient(TradenetError, ValueError):
    """A regression design matrix does not have full column rank."""


class TooFewObservations(TradenetError, ValueError):
    """A regression has no more observations than coefficients."""


class MOutOfRange(TradenetError, ValueError):
    """Cost regressions only accept rows with 1 <= M <= 3."""


class DegenerateSample(TradenetError, ValueError):
    """A two-sample statistic is undefined for the given samples."""
