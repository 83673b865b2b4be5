"""Exception types raised across the package."""


class ParamsError(ValueError):
    """Invalid (d, g, h) parameters."""


class NotCoprime(ParamsError):
    pass


class OrderViolation(ParamsError):
    pass


class CongruenceViolation(ParamsError):
    pass


class MagnitudeViolation(ParamsError):
    pass


class IncompleteTable(ParamsError):
    pass


class DomainError(ValueError):
    """An integer outside the domain (positive, divisible by neither d nor g)."""


class ResidueError(ValueError):
    """A residue that is not in E."""


class WindowTooSmall(ValueError):
    pass


class DegenerateDrift(ArithmeticError):
    pass


class EmptySample(ValueError):
    pass
