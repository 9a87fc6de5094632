"""Exception types shared across the package."""


class FormError(ValueError):
    """Invalid input: mismatched dimensions or degrees, malformed data."""


class NotApplicableError(FormError):
    """The requested quantity is undefined for this input (e.g. odd n)."""


class CapabilityError(RuntimeError):
    """The input exceeds what a brute-force routine is willing to handle."""


class NumericalError(ArithmeticError):
    """An eigensolve or factorization produced inconsistent output."""
