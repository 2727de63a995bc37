"""Laurent's lower bound for a linear form in two logarithms, evaluated
with directed rounding.

For parameters rho > 1, 1/3 <= mu <= 1, heights a1, a2 and h satisfying
the theorem's hypotheses,

    log|Lambda| >= -C h'^2 a1 a2 - sqrt(omega theta) h' - log(C' h'^2 a1 a2)

with sigma = (1 + 2mu - mu^2)/2, lambda = sigma log rho,
H = h/lambda + 1/sigma, omega = 2 + 2 sqrt(1 + 1/(4H^2)),
theta = sqrt(1 + 1/(4H^2)) + 1/(2H), h' = h + lambda/sigma,
C = C0 mu / (lambda^3 sigma), C' = sqrt(C sigma omega theta / (lambda^3 mu)),
C0 = (omega/6 + 1/2 sqrt(omega^2/9 + 8 lambda omega^(5/4) theta^(1/4)
      / (3 sqrt(a1 a2) H^(1/2)) + 4/3 (1/a1 + 1/a2) lambda omega / H))^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .directed import DOWN, UP, DirectedReal, Enclosure, Exact, log_exact, root, sqrt


class LaurentHypothesisError(ValueError):
    """The inputs violate a hypothesis of the lower bound."""


def sigma_exact(mu: Exact) -> Fraction:
    mu = Fraction(mu)
    if not Fraction(1, 3) <= mu <= 1:
        raise ValueError("mu must lie in [1/3, 1]")
    return (1 + 2 * mu - mu * mu) / 2


def sigma_lambda(rho: Exact, mu: Exact) -> Tuple[Enclosure, Enclosure]:
    """sigma and lambda = sigma log(rho), each enclosed from both sides."""
    rho = Fraction(rho)
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    sig = Enclosure.exact(sigma_exact(mu))
    lam = Enclosure.of(lambda r: sig.pick(r) * log_exact(rho, r))
    return sig, lam


@dataclass(frozen=True)
class LaurentConstants:
    rho: Fraction
    mu: Fraction
    sigma: Enclosure
    lam: Enclosure
    H: DirectedReal  # DOWN
    omega: DirectedReal  # UP
    theta: DirectedReal  # UP
    C0: DirectedReal  # UP
    C: DirectedReal  # UP
    Cprime: DirectedReal  # UP
    hprime: DirectedReal  # UP

    def __post_init__(self):
        if self.H.rounding is not DOWN:
            raise ValueError("H must be a lower bound")
        for name in ("omega", "theta", "C0", "C", "Cprime", "hprime"):
            if getattr(self, name).rounding is not UP:
                raise ValueError(f"{name} must be an upper bound")


def laurent_constants(
    rho: Exact, mu: Exact, a1: Enclosure, a2: Enclosure, h: Enclosure
) -> LaurentConstants:
    """All constants of the lower bound, each rounded in its safe direction.

    ``a1``, ``a2`` and ``h`` enclose the values actually chosen for the
    heights; C0 is decreasing in a1, a2 and H, so their lower ends are used
    there.
    """
    rho, mu = Fraction(rho), Fraction(mu)
    sig, lam = sigma_lambda(rho, mu)
    if a1.lo < 1 or a2.lo < 1:
        raise LaurentHypothesisError("a1 and a2 must be at least 1")
    if a1.lo * a2.lo < lam.hi * lam.hi:
        raise LaurentHypothesisError("a1 a2 >= lambda^2 fails")
    if h.lo < lam.hi:
        raise LaurentHypothesisError("h >= lambda fails")
    if h.lo < log_exact(2, UP) / 2:
        raise LaurentHypothesisError("h >= (log 2)/2 fails")

    H = h.lo / lam.hi + 1 / sig.hi
    inv = 1 / (4 * H * H)  # UP
    s = sqrt(1 + inv)
    omega = 2 + 2 * s
    theta = s + 1 / (2 * H)

    a1a2 = a1.lo * a2.lo
    cross = 8 * lam.hi * root(omega**5, 4) * root(theta, 4) / (3 * sqrt(a1a2) * sqrt(H))
    tail = Fraction(4, 3) * (1 / a1.lo + 1 / a2.lo) * lam.hi * omega / H
    C0 = (omega / 6 + sqrt(omega * omega / 9 + cross + tail) / 2) ** 2
    C = C0 * mu / (lam.lo**3 * sig.lo)
    Cprime = sqrt(C * sig.hi * omega * theta / (lam.lo**3 * DirectedReal(mu, DOWN)))
    hprime = h.hi + lam.hi / sig.lo
    return LaurentConstants(rho, mu, sig, lam, H, omega, theta, C0, C, Cprime, hprime)
