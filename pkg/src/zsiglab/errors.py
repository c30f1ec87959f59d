"""Exception hierarchy shared by every module."""


class LabError(ValueError):
    """Base class for validation and domain errors."""

    code = "error"


class ZeroInput(LabError):
    code = "zero_input"


class NotPrime(LabError):
    code = "not_prime"


class AllZero(LabError):
    code = "all_zero"


class DimensionMismatch(LabError):
    code = "dimension_mismatch"


class BaseLocus(LabError):
    """All forms of a morphism vanish at the point."""

    code = "base_locus"


class IndexOutOfRange(LabError):
    code = "index_out_of_range"


class NonIntegral(LabError):
    code = "non_integral"


class OnDivisor(LabError):
    code = "on_divisor"


class DegreeTooSmall(LabError):
    code = "degree_too_small"


class NotLinear(LabError):
    code = "not_linear"


class ZeroTerm(LabError):
    code = "zero_term"


class ResourceLimit(RuntimeError):
    """A configured size ceiling was exceeded.

    Kept outside ``LabError`` on purpose: callers treat it as a truncation
    (partial result) rather than as invalid input.
    """

    code = "resource_limit"
