"""Exception types shared across the package."""


class LeagueBalanceError(Exception):
    """Base class for all package errors."""


class InputError(LeagueBalanceError):
    """Invalid input data: schema violations, broken invariants, misaligned keys."""


class ConfigError(LeagueBalanceError):
    """Invalid configuration file or option combination."""


class NumericalError(LeagueBalanceError):
    """Estimation failure: singular design, degenerate series, irreparable covariance."""
