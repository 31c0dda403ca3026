"""
Special functions behind every distribution computation of the engine.

Everything here is a pure function of its arguments: no module state besides
the memoized quantile cache, so it is safe to call from any thread.
"""
import math
import logging
from functools import lru_cache
from statistics import NormalDist

from .exceptions import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 300
CF_TOLERANCE = 1e-15
FPMIN = 1e-300

QUANTILE_MAX_ITERATIONS = 200
QUANTILE_TOLERANCE = 1e-14

_STANDARD_NORMAL = NormalDist()


def _check_df(df: float) -> float:
    if not (df > 0) or math.isinf(df):
        raise DomainError(f'degrees of freedom must be a positive finite number, got {df!r}')
    return float(df)


def _check_open_probability(p: float) -> float:
    if not (0.0 < p < 1.0):
        raise DomainError(f'probability must lie strictly between 0 and 1, got {p!r}')
    return float(p)


def ln_gamma(x: float) -> float:
    """
    Natural logarithm of the gamma function.

    Args:
        x (float): Positive real argument.

    Returns:
        float: ln Γ(x).

    Raises:
        DomainError: If x <= 0 or is not finite.

    Examples:
        >>> ln_gamma(1.0)
        0.0
        >>> round(ln_gamma(10.0), 7)
        12.8018275
    """
    if not (x > 0) or math.isinf(x):
        raise DomainError(f'ln_gamma requires x > 0, got {x!r}')
    return math.lgamma(x)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d

    for m in range(1, MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOLERANCE:
            return h

    raise ConvergenceError(
        f'incomplete beta continued fraction did not converge in {MAX_ITERATIONS} '
        f'iterations (a={a}, b={b}, x={x})'
    )


def _reg_inc_beta(a: float, b: float, x: float, y: float) -> float:
    # y is 1 - x, passed separately so callers can supply it without cancellation.
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0

    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)

    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, y) / b


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """
    Regularized incomplete beta function Iₓ(a, b).

    Evaluated with the continued fraction on whichever side of
    x = (a+1)/(a+b+2) converges fastest.

    Args:
        a (float): First shape parameter, > 0.
        b (float): Second shape parameter, > 0.
        x (float): Upper integration limit in [0, 1].

    Returns:
        float: Probability in [0, 1].

    Raises:
        DomainError: Outside the preconditions.
        ConvergenceError: If the continued fraction does not converge.
    """
    if not (a > 0) or not (b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f'reg_inc_beta requires a > 0 and b > 0, got a={a!r}, b={b!r}')
    if not (0.0 <= x <= 1.0):
        raise DomainError(f'reg_inc_beta requires 0 <= x <= 1, got {x!r}')
    return _reg_inc_beta(float(a), float(b), float(x), 1.0 - float(x))


def t_pdf(t: float, df: float) -> float:
    """Density of Student's t distribution."""
    df = _check_df(df)
    log_density = (
        math.lgamma((df + 1.0) / 2.0) - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - (df + 1.0) / 2.0 * math.log1p(t * t / df)
    )
    return math.exp(log_density)


def t_cdf(t: float, df: float) -> float:
    """
    Cumulative distribution function of Student's t distribution.

    Uses P(T <= t) = 1 - I_x(df/2, 1/2)/2 for t > 0 with x = df/(df+t²),
    and the mirrored tail for t < 0. Non-integer df is accepted.

    Args:
        t (float): Quantile.
        df (float): Degrees of freedom, > 0.

    Returns:
        float: P(T <= t).

    Raises:
        DomainError: If df <= 0.
    """
    df = _check_df(df)
    if math.isnan(t):
        raise DomainError('t_cdf is undefined for NaN')
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0

    t2 = t * t
    denominator = df + t2
    tail = 0.5 * _reg_inc_beta(df / 2.0, 0.5, df / denominator, t2 / denominator)
    return 1.0 - tail if t > 0 else tail


def _bracket(cdf, p: float) -> tuple[float, float]:
    lo, hi = -1.0, 1.0
    while cdf(lo) > p:
        lo *= 2.0
        if lo < -1e300:
            raise ConvergenceError(f'could not bracket quantile for p={p}')
    while cdf(hi) < p:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError(f'could not bracket quantile for p={p}')
    return lo, hi


@lru_cache(maxsize=4096)
def _t_quantile(p: float, df: float) -> float:
    def cdf(value):
        return t_cdf(value, df)

    lo, hi = _bracket(cdf, p)
    x = 0.5 * (lo + hi)

    for _ in range(QUANTILE_MAX_ITERATIONS):
        f = cdf(x) - p
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x

        density = t_pdf(x, df)
        candidate = x - f / density if density > 0 else math.nan
        # Newton steps that leave the bracket fall back to bisection.
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)

        if abs(candidate - x) <= QUANTILE_TOLERANCE * max(1.0, abs(x)):
            return candidate
        x = candidate

    raise ConvergenceError(f't_quantile did not converge for p={p}, df={df}')


def t_quantile(p: float, df: float) -> float:
    """
    Inverse of t_cdf: the t such that t_cdf(t, df) = p.

    Solved by bracketing and Newton refinement (density as derivative),
    falling back to bisection whenever Newton leaves the bracket.

    Args:
        p (float): Probability in (0, 1).
        df (float): Degrees of freedom, > 0.

    Returns:
        float: Quantile of Student's t distribution.

    Raises:
        DomainError: If p is not in (0, 1) or df <= 0.
        ConvergenceError: If the iteration limit is reached.

    Examples:
        >>> round(t_quantile(0.975, 10), 4)
        2.2281
    """
    p = _check_open_probability(p)
    df = _check_df(df)
    if p == 0.5:
        return 0.0
    return _t_quantile(p, df)


def norm_pdf(z: float) -> float:
    """Standard normal density."""
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def norm_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    if math.isnan(z):
        raise DomainError('norm_cdf is undefined for NaN')
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def norm_quantile(p: float) -> float:
    """
    Inverse standard normal CDF.

    Raises:
        DomainError: If p is not in (0, 1).
    """
    p = _check_open_probability(p)
    if p == 0.5:
        return 0.0
    return _STANDARD_NORMAL.inv_cdf(p)
