"""Random Euler products f(s, θ) = ∏_p (1 - e(θp) p^-s)^-1 and the exponential sums behind them."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    FitError,
    InvalidArgument,
    NumericalFailure,
    QuadratureError,
    RandprodError,
    ResourceLimitError,
)
from .primes import LambdaTable, PrimePower, build_lambda_table  # noqa: E402
from .theta import ThetaSample  # noqa: E402

__all__ = [
    "DomainError",
    "FitError",
    "InvalidArgument",
    "LambdaTable",
    "NumericalFailure",
    "PrimePower",
    "QuadratureError",
    "RandprodError",
    "ResourceLimitError",
    "ThetaSample",
    "build_lambda_table",
]
