"""
Standard normal CDF and quantile.
"""

import math
from typing import Union

import numpy as np
from scipy.special import erfc

from ..models import FragmentationError

ArrayLike = Union[float, np.ndarray]

# rational approximation of the lower-half quantile
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class DomainError(FragmentationError):
    """Argument outside the domain of the function."""


def normal_cdf(t: ArrayLike) -> ArrayLike:
    """Phi(t) = erfc(-t / sqrt(2)) / 2, accurate in both tails."""
    value = 0.5 * erfc(-np.asarray(t, dtype=float) / math.sqrt(2.0))
    return float(value) if np.ndim(value) == 0 else value


def _initial_guess(u: float) -> float:
    if u < _P_LOW:
        q = math.sqrt(-2.0 * math.log(u))
        c, d = _C, _D
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    q = u - 0.5
    r = q * q
    a, b = _A, _B
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
        ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    )


def normal_quantile(u: float) -> float:
    """
    Q(u) = Phi^{-1}(u) for u in (0, 1).

    A rational first guess is polished by one Halley step; the upper half is
    obtained as -Q(1 - u) so that Q(1 - u) = -Q(u) holds exactly.

    Raises:
        DomainError: if u is not strictly inside (0, 1)
    """
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"Normal quantile needs 0 < u < 1, got {u!r}")
    if u > 0.5:
        return -normal_quantile(1.0 - u)
    if u == 0.5:
        return 0.0

    x = _initial_guess(u)
    e = normal_cdf(x) - u
    try:
        step = e * _SQRT_2PI * math.exp(0.5 * x * x)
    except OverflowError:
        # subnormal u: the density underflows and the guess is already final
        return x
    return x - step / (1.0 + 0.5 * x * step)
