"""
Large-deviation calculus for the left endpoint of the fragmentation.

For an atomic measure H on [0, 1]:

    Lambda(theta) = sum_i w_i log(1 - t_i + t_i e^theta)
    I(alpha)      = alpha theta(alpha) - Lambda(theta(alpha)),  Lambda'(theta(alpha)) = alpha

The share of break points below x^n converges to alpha_I(x), the solution of
I(alpha) = log(1/x) on the decreasing branch of I.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import rel_entr

from ..models import AtomicMeasure, DegenerateMeasure, FragmentationError, RateProfile

logger = logging.getLogger(__name__)

THETA_BRACKET = 745.0
THETA_TOLERANCE = 1e-13
NEWTON_STEPS = 3
MAX_BISECTIONS = 200
ALPHA_WIDTH = 4e-16


class AlphaOutOfRange(FragmentationError):
    """alpha lies outside the range on which theta(alpha) exists."""


class XOutOfRange(FragmentationError):
    """x lies outside the domain of the endpoint limit function."""


@dataclass(frozen=True)
class ThetaSolution:
    """Root of Lambda'(theta) = alpha with its diagnostics."""

    theta: float
    residual: float
    iterations: int


def _split(H: AtomicMeasure):
    t, w = H.locations, H.weights
    interior = (t > 0.0) & (t < 1.0)
    return t[interior], w[interior], float(w[t == 1.0].sum())


def lambda_fn(H: AtomicMeasure, theta: float) -> float:
    """
    Lambda(theta) in a form that neither overflows nor cancels.

    Atoms at 0 contribute nothing and atoms at 1 contribute theta * w exactly.
    """
    t, w, mass_one = _split(H)
    if theta <= 0.0:
        terms = np.log1p(t * math.expm1(theta))
    else:
        terms = theta + np.log1p((1.0 - t) * math.expm1(-theta))
    return float(np.dot(w, terms)) + theta * mass_one


def _tilted_means(H: AtomicMeasure, theta: float) -> np.ndarray:
    t = H.locations
    with np.errstate(divide="ignore", invalid="ignore"):
        if theta <= 0.0:
            e = math.exp(theta)
            r = t * e / (1.0 - t + t * e)
        else:
            r = t / (t + (1.0 - t) * math.exp(-theta))
    r = np.where(t == 1.0, 1.0, r)
    return np.where(t == 0.0, 0.0, r)


def lambda_prime(H: AtomicMeasure, theta: float) -> float:
    """Lambda'(theta) = sum_i w_i t_i e^theta / (1 - t_i + t_i e^theta)."""
    return float(np.dot(H.weights, _tilted_means(H, theta)))


def lambda_second(H: AtomicMeasure, theta: float) -> float:
    r = _tilted_means(H, theta)
    return float(np.dot(H.weights, r * (1.0 - r)))


def _check_alpha(H: AtomicMeasure, alpha: float) -> None:
    if not H.charges_interior:
        raise DegenerateMeasure("H must charge the open interval (0, 1)")
    lower, upper = H.mass_at_one, 1.0 - H.mass_at_zero
    if not lower < alpha < upper:
        raise AlphaOutOfRange(
            f"alpha={alpha!r} outside the attainable interval ({lower!r}, {upper!r})"
        )


def theta_solution(H: AtomicMeasure, alpha: float) -> ThetaSolution:
    """
    Solve Lambda'(theta) = alpha.

    Bisection on [-745, 745] narrows theta to 1e-13, then at most three Newton
    steps polish the root without leaving the final bracket.

    Args:
        H: Measure charging (0, 1)
        alpha: Target in (H({1}), 1 - H({0}))

    Returns:
        ThetaSolution
    """
    _check_alpha(H, alpha)

    lo, hi = -THETA_BRACKET, THETA_BRACKET
    if lambda_prime(H, lo) >= alpha or lambda_prime(H, hi) <= alpha:
        raise AlphaOutOfRange(f"alpha={alpha!r} is not attained for |theta| <= {THETA_BRACKET}")

    iterations = 0
    while hi - lo > THETA_TOLERANCE * max(1.0, abs(lo), abs(hi)) and iterations < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if lambda_prime(H, mid) < alpha:
            lo = mid
        else:
            hi = mid
        iterations += 1

    theta = 0.5 * (lo + hi)
    residual = lambda_prime(H, theta) - alpha
    for _ in range(NEWTON_STEPS):
        slope = lambda_second(H, theta)
        if residual == 0.0 or slope <= 0.0:
            break
        candidate = theta - residual / slope
        if not lo <= candidate <= hi:
            break
        candidate_residual = lambda_prime(H, candidate) - alpha
        if abs(candidate_residual) >= abs(residual):
            break
        theta, residual = candidate, candidate_residual
        iterations += 1

    logger.debug("theta(%r) = %r, residual %.3e after %d iterations", alpha, theta, residual, iterations)
    return ThetaSolution(theta=theta, residual=abs(residual), iterations=iterations)


def solve_theta(H: AtomicMeasure, alpha: float) -> float:
    """theta(alpha), the unique root of Lambda'(theta) = alpha."""
    return theta_solution(H, alpha).theta


def rate_I0_and_xstar(H: AtomicMeasure) -> Tuple[float, float]:
    """
    I(0) = -sum w_i log(1 - t_i) and x_star = exp(-I(0)).

    Any mass at t = 1 makes I(0) infinite and x_star zero.
    """
    if H.mass_at_one > 0.0:
        return math.inf, 0.0
    I0 = -float(np.dot(H.weights, np.log1p(-H.locations))) + 0.0
    return I0, math.exp(-I0)


def build_rate_profile(H: AtomicMeasure) -> RateProfile:
    """Solve the scalar constants of the endpoint theory for H."""
    if not H.charges_interior:
        raise DegenerateMeasure("H({0, 1}) must be < 1")
    I0, x_star = rate_I0_and_xstar(H)
    below_one = H.locations < 1.0
    I_floor = -float(np.dot(H.weights[below_one], np.log1p(-H.locations[below_one]))) + 0.0
    profile = RateProfile(
        H=H,
        p_bar=H.mean(),
        I0=I0,
        x_star=x_star,
        alpha_lo=H.mass_at_one,
        I_floor=I_floor,
    )
    logger.debug(
        "Rate profile: p_bar=%r I0=%r x_star=%r alpha_lo=%r",
        profile.p_bar, profile.I0, profile.x_star, profile.alpha_lo,
    )
    return profile


def rate_I(profile: RateProfile, alpha: float) -> float:
    """I(alpha) = alpha theta(alpha) - Lambda(theta(alpha)), clipped at 0."""
    theta = solve_theta(profile.H, alpha)
    return max(alpha * theta - lambda_fn(profile.H, theta), 0.0)


def alpha_I(profile: RateProfile, x: float) -> float:
    """
    Inverse of I on [alpha_lo, p_bar]: the alpha with I(alpha) = log(1/x).

    Only bisection is used since theta(alpha) = I'(alpha) diverges at the
    floor. For x at or below ``x_floor`` (only reachable when H({1}) > 0) the
    floor ``alpha_lo`` is returned.

    Raises:
        XOutOfRange: if x <= x_star or x > 1
    """
    if not profile.x_star < x <= 1.0:
        raise XOutOfRange(f"x={x!r} outside ({profile.x_star!r}, 1]")
    if x == 1.0:
        return profile.p_bar
    if x <= profile.x_floor:
        return profile.alpha_lo

    target = -math.log(x)
    lo, hi = profile.alpha_lo, profile.p_bar
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if hi - lo <= ALPHA_WIDTH or mid in (lo, hi):
            break
        if rate_I(profile, mid) > target:
            lo = mid
        else:
            hi = mid
    return mid


def tilde_g_cdf(profile: RateProfile, x: float) -> float:
    """
    Limit of the transformed measure: tilde_g([0, x]).

    ``alpha_lo`` on [0, x_floor] (an atom of mass H({1}) at 0), alpha_I(x) up
    to 1, and 1 at x = 1 where the remaining 1 - p_bar sits.
    """
    if x >= 1.0:
        return 1.0
    if x <= profile.x_floor or x <= profile.x_star:
        return profile.alpha_lo
    return alpha_I(profile, x)


def annealed_rate(p_bar: float, alpha: float) -> float:
    """Kullback-Leibler rate alpha log(alpha/p) + (1-alpha) log((1-alpha)/(1-p)), 0 log 0 = 0."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha={alpha!r} outside [0, 1]")
    return float(rel_entr(alpha, p_bar) + rel_entr(1.0 - alpha, 1.0 - p_bar))


def annealed_cdf_bound(p_bar: float, x: float) -> float:
    """
    F_a(x) = alpha_a(x) / p_bar, where alpha_a inverts the annealed rate on [0, p_bar].

    Raises:
        XOutOfRange: if x is outside [1 - p_bar, 1]
    """
    if not 1.0 - p_bar <= x <= 1.0:
        raise XOutOfRange(f"x={x!r} outside [{1.0 - p_bar!r}, 1]")
    if x == 1.0:
        return 1.0
    target = -math.log(x)
    if target >= annealed_rate(p_bar, 0.0):
        return 0.0
    alpha = brentq(
        lambda a: annealed_rate(p_bar, a) - target, 0.0, p_bar, xtol=1e-15, rtol=1e-15
    )
    return min(alpha / p_bar, 1.0)
