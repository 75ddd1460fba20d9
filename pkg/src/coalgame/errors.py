"""Exception types shared across the package."""


class CoalGameError(Exception):
    """Base class for every error raised by this library."""


class InvalidProfile(CoalGameError):
    """A strategy profile has the wrong length or an out-of-range index."""


class InvalidPlayer(CoalGameError):
    """A player index is out of range."""


class ArityMismatch(CoalGameError):
    """A joint deviation does not supply one strategy per coalition member."""


class InvalidArgument(CoalGameError):
    """A scalar argument is outside its documented domain."""


class InvalidDistribution(CoalGameError):
    """A distribution over profiles is malformed (bad support or mass)."""


class StateSpaceTooLarge(CoalGameError):
    """An exhaustive enumeration would exceed its configured cap."""

    def __init__(self, size: int, cap: int, what: str = "profiles"):
        self.size = size
        self.cap = cap
        super().__init__(f"state space of {size} {what} exceeds the cap of {cap}")


class SpecError(CoalGameError):
    """A game-spec document failed validation; ``path`` names the bad field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class MissingOutStrategy(CoalGameError):
    """The requested analysis needs per-player exit strategies and the game has none."""


class MissingPotential(CoalGameError):
    """The requested analysis needs a potential oracle and the game exposes none."""


class Incomparable(CoalGameError):
    """The potential cannot be bracketed against welfare (zero-welfare profile with nonzero potential)."""


class NotMultisetExtendable(CoalGameError):
    """The game family has no occupancy semantics, so its potential has no multiset extension."""


class DegenerateGame(CoalGameError):
    """The optimum has zero value, so efficiency ratios are undefined."""


class RejectedCertificate(CoalGameError):
    """A smoothness certificate that failed verification was supplied where a verified one is required."""


class UnsupportedProperty(CoalGameError):
    """The requested structural property is undefined for this game's objective or family."""
