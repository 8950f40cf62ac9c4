"""Special functions backing the statistical tests.

The error function is evaluated from its confluent power series for small
arguments and from the classical continued fraction for the complementary
function at large arguments; the regularized incomplete beta function uses
the standard continued fraction evaluated with the modified Lentz algorithm.
Target absolute accuracy is 1e-12 over the distribution-function domain,
which comfortably covers the p-values these feed.
"""

from __future__ import annotations

import math

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2 = math.sqrt(2.0)
_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 500

# Crossover between the erf series and the erfc continued fraction.
_ERF_SERIES_LIMIT = 2.0


class ConvergenceError(ArithmeticError):
    """A series or continued fraction failed to converge."""


def _erf_series(x: float) -> float:
    # erf(x) = (2x e^{-x^2} / sqrt(pi)) * sum_{n>=0} (2x^2)^n / (1*3*...*(2n+1)),
    # all terms positive so no cancellation.
    t = 2.0 * x * x
    term = 1.0
    total = 1.0
    denom = 1.0
    for n in range(1, _MAX_ITER):
        denom += 2.0
        term *= t / denom
        total += term
        if term < _EPS * total:
            return 2.0 * x * math.exp(-x * x) / _SQRT_PI * total
    raise ConvergenceError(f"erf series did not converge for x={x!r}")


def _erfc_cf(x: float) -> float:
    # erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    # for x > 0, evaluated by modified Lentz.
    c = 1.0 / _FPMIN
    d = 1.0 / x
    h = d
    for n in range(1, _MAX_ITER):
        a = n / 2.0  # partial numerators 1/2, 1, 3/2, ...; denominators all x
        d = x + a * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = x + a / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x * x) / _SQRT_PI * h
    raise ConvergenceError(f"erfc continued fraction did not converge for x={x!r}")


def erf(x: float) -> float:
    """Error function."""
    if x == 0.0:
        return 0.0
    if x < 0.0:
        return -erf(-x)
    if x < _ERF_SERIES_LIMIT:
        return _erf_series(x)
    return 1.0 - erfc(x)


def erfc(x: float) -> float:
    """Complementary error function, accurate in the upper tail."""
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < _ERF_SERIES_LIMIT:
        return 1.0 - _erf_series(x)
    if x * x > 700.0:  # exp underflows; the true value is < 1e-300
        return 0.0
    return _erfc_cf(x)


def normal_cdf(x: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * erfc(-x / _SQRT_2)


def normal_sf(x: float) -> float:
    """Standard normal survival function, 1 - cdf, accurate for large x."""
    return 0.5 * erfc(x / _SQRT_2)


def normal_two_sided_p(z: float) -> float:
    """P(|Z| >= |z|) for a standard normal Z."""
    return erfc(abs(z) / _SQRT_2)


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta function (modified Lentz).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for "
        f"a={a!r}, b={b!r}, x={x!r}"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function.

    Uses the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to pick the branch where
    the continued fraction converges fastest.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    if x < 0.0 or x > 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """Student t distribution function with ``df`` degrees of freedom."""
    if df <= 0.0:
        raise ValueError(f"degrees of freedom must be positive, got {df!r}")
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for a Student t variable with ``df`` degrees of freedom."""
    if df <= 0.0:
        raise ValueError(f"degrees of freedom must be positive, got {df!r}")
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
