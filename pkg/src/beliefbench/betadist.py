"""Beta-distribution primitives and the special functions behind them.

Everything in this module is pure and dependency-free (stdlib ``math`` only)
so that the numerical core of the workbench is fully auditable: log-gamma via
a Lanczos approximation, digamma via recurrence plus an asymptotic tail, and
the regularized incomplete beta via a Lentz-style continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoInteriorModeError

__all__ = [
    "BetaParams",
    "Interval",
    "log_gamma",
    "digamma",
    "log_beta",
    "beta_pdf",
    "beta_cdf",
    "beta_mean",
    "beta_sd",
    "beta_mode",
    "beta_kld",
]


@dataclass(frozen=True)
class BetaParams:
    """A Beta(alpha, beta) belief distribution over a proportion.

    ``alpha`` acts as a pseudo-count of successes and ``beta`` of failures;
    both must be positive and finite.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError(f"Beta parameters must be finite, got ({self.alpha}, {self.beta})")
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise DomainError(f"Beta parameters must be positive, got ({self.alpha}, {self.beta})")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_dict(cls, d: dict) -> "BetaParams":
        return cls(d["alpha"], d["beta"])


@dataclass(frozen=True)
class Interval:
    """A sub-range [lo, hi] of the unit interval, lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise DomainError(f"interval must satisfy 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


# Lanczos approximation, g = 7, 9 coefficients (Godfrey's classic set).
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Uses the reflection formula below 0.5 and the Lanczos series above it.
    The large-x branch is arranged as ``(x - 0.5) * (log t - 1) - g`` to
    avoid the catastrophic ``big - big`` cancellation of the textbook form.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    series = _LANCZOS_COEFFS[0]
    for i in range(1, 9):
        series += _LANCZOS_COEFFS[i] / (x - 1.0 + i)
    t = x + (_LANCZOS_G - 0.5)
    return _HALF_LOG_TWO_PI + (x - 0.5) * (math.log(t) - 1.0) - _LANCZOS_G + math.log(series)


def digamma(x: float) -> float:
    """Digamma psi(x) = d/dx ln Gamma(x) for x > 0.

    Shifts x above 10 with psi(x) = psi(x + 1) - 1/x, then applies the
    asymptotic (Bernoulli-number) series.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # psi(x) ~ ln x - 1/2x - sum B_2n / (2n x^2n), terms through x^-14
    tail = inv2 * (
        1.0 / 12.0
        - inv2 * (
            1.0 / 120.0
            - inv2 * (
                1.0 / 252.0
                - inv2 * (
                    1.0 / 240.0
                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))
                )
            )
        )
    )
    return acc + math.log(x) - 0.5 * inv - tail


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_pdf(p: float, d: BetaParams) -> float:
    """Density of Beta(d.alpha, d.beta) at p in [0, 1].

    At the endpoints the limit is returned; a negative exponent there yields
    ``math.inf``, a deliberate flagged value so plotting code can clamp it.
    """
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"beta_pdf requires p in [0, 1], got {p}")
    a, b = d.alpha, d.beta
    if p == 0.0:
        if a < 1.0:
            return math.inf
        if a == 1.0:
            return b  # kernel -> 1, 1/B(1, b) = b
        return 0.0
    if p == 1.0:
        if b < 1.0:
            return math.inf
        if b == 1.0:
            return a
        return 0.0
    log_pdf = (a - 1.0) * math.log(p) + (b - 1.0) * math.log1p(-p) - log_beta(a, b)
    return math.exp(log_pdf)


_CF_MAX_ITER = 2000
_CF_EPS = 3e-16
_CF_TINY = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, evaluated by Lentz's method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def beta_cdf(p: float, d: BetaParams) -> float:
    """Regularized incomplete beta I_p(alpha, beta).

    Monotone in p with cdf(0) = 0 and cdf(1) = 1. The continued fraction is
    applied directly below the mean and through the symmetry relation
    I_p(a, b) = 1 - I_{1-p}(b, a) above it.
    """
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"beta_cdf requires p in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    a, b = d.alpha, d.beta
    ln_front = a * math.log(p) + b * math.log1p(-p) - log_beta(a, b)
    if p <= a / (a + b):
        value = math.exp(ln_front) * _beta_cont_frac(a, b, p) / a
    else:
        value = 1.0 - math.exp(ln_front) * _beta_cont_frac(b, a, 1.0 - p) / b
    # Guard against rounding just past the endpoints.
    return min(1.0, max(0.0, value))


def beta_mean(d: BetaParams) -> float:
    """alpha / (alpha + beta)."""
    return d.alpha / (d.alpha + d.beta)


def beta_sd(d: BetaParams) -> float:
    """Standard deviation sqrt(ab / ((a+b)^2 (a+b+1)))."""
    s = d.alpha + d.beta
    return math.sqrt(d.alpha * d.beta / (s * s * (s + 1.0)))


def beta_mode(d: BetaParams) -> float:
    """Interior mode (alpha - 1) / (alpha + beta - 2); requires alpha, beta > 1."""
    if d.alpha <= 1.0 or d.beta <= 1.0:
        raise NoInteriorModeError(
            f"Beta({d.alpha}, {d.beta}) has no interior mode; requires alpha > 1 and beta > 1"
        )
    return (d.alpha - 1.0) / (d.alpha + d.beta - 2.0)


def beta_kld(p: BetaParams, q: BetaParams) -> float:
    """Kullback-Leibler divergence D_KL(p || q) between two Beta distributions.

    Closed form:

        ln B(aq, bq) - ln B(ap, bp)
        + (ap - aq) psi(ap) + (bp - bq) psi(bp)
        + (aq - ap + bq - bp) psi(ap + bp)

    The result is nonnegative and zero iff p == q. Argument order matters:
    the first argument is the distribution the expectation is taken under
    (here, a participant's fit), the second the reference (the normative
    posterior).
    """
    ap, bp = p.alpha, p.beta
    aq, bq = q.alpha, q.beta
    if ap == aq and bp == bq:
        return 0.0
    value = (
        log_beta(aq, bq)
        - log_beta(ap, bp)
        + (ap - aq) * digamma(ap)
        + (bp - bq) * digamma(bp)
        + (aq - ap + bq - bp) * digamma(ap + bp)
    )
    # Mathematically >= 0; tiny negatives are rounding residue.
    return max(0.0, value)
