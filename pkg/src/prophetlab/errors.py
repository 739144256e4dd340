"""Exception types raised across the package."""


class ProphetLabError(Exception):
    pass


class ZeroMass(ProphetLabError, ValueError):
    """Conditioning on an event of probability zero."""


class MalformedFamily(ProphetLabError, ValueError):
    pass


class IndexOutOfRange(ProphetLabError, IndexError):
    pass


class TooLarge(ProphetLabError):
    """An exact computation would exceed its enumeration cap."""


class UndeclaredRandomness(ProphetLabError):
    """Exact evaluation requested for a policy whose randomness is not finite/declared."""


class WrongFamily(ProphetLabError, TypeError):
    pass


class PolicyError(ProphetLabError):
    """A policy tried to build an infeasible set."""


class BadParams(ProphetLabError, ValueError):
    pass


class UnknownGenerator(ProphetLabError, KeyError):
    pass


class InstanceOverflow(ProphetLabError, OverflowError):
    pass
