"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class NumericsError(ArithmeticError):
    """Raised when a computation hits non-finite values or an internal
    consistency check fails (for example a provably nonnegative quantity
    coming out negative beyond rounding)."""
