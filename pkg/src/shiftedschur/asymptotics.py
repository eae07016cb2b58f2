"""Centering and scaling constants for the largest row.

With ``tau = m/n`` and ``alpha^2 < tau < alpha^-2`` the phase function

    sigma(z) = tau log((1 + a z)/(1 - a z)) + log((z - a)/(z + a)) - c log z

has a double critical point ``z0`` in ``(a, 1/a)``.  Then
``lambda_1 ~ c1 n + c2 n^(1/3) X`` for X with law F2, where ``c1 = c``,
``c2 = 1/g`` and ``g = z0^-1 (2/sigma'''(z0))^(1/3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError

_ENDPOINT_OFFSET = 1e-9


def _check(alpha: float, tau: float) -> tuple[float, float]:
    a, t = float(alpha), float(tau)
    if not 0 < a < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    if not t > 0:
        raise ValidationError("tau must be positive")
    if not a * a < t < 1 / (a * a):
        raise DomainError(f"tau={t} outside ({a * a}, {1 / (a * a)})")
    return a, t


def saddle_equation(z: float, alpha: float, tau: float) -> float:
    a2 = alpha * alpha
    return tau * (1 + a2 * z * z) / (1 - a2 * z * z) ** 2 - (a2 + z * z) / (z * z - a2) ** 2


def _saddle_derivative(z: float, a: float, t: float) -> float:
    a2, z2 = a * a, z * z
    d1 = t * (2 * a2 * z * (1 - a2 * z2) + 4 * a2 * z * (1 + a2 * z2)) / (1 - a2 * z2) ** 3
    d2 = (2 * z * (z2 - a2) - 4 * z * (a2 + z2)) / (z2 - a2) ** 3
    return d1 - d2


def saddle_z0(alpha: float, tau: float) -> float:
    """Root of the saddle equation in (alpha, 1/alpha): bisection, then Newton polish."""
    a, t = _check(alpha, tau)
    lo, hi = a + _ENDPOINT_OFFSET, 1 / a - _ENDPOINT_OFFSET
    flo = saddle_equation(lo, a, t)
    if flo > 0 or saddle_equation(hi, a, t) < 0:
        raise DomainError("saddle equation has no sign change on the bracket")
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if (saddle_equation(mid, a, t) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    for _ in range(3):
        d = _saddle_derivative(z, a, t)
        if d == 0:
            break
        step = saddle_equation(z, a, t) / d
        if not lo - 1e-12 <= z - step <= hi + 1e-12:
            break
        z -= step
    return z


def sigma(z: float, alpha: float, tau: float, c: float) -> float:
    return (tau * math.log((1 + alpha * z) / (1 - alpha * z))
            + math.log((z - alpha) / (z + alpha)) - c * math.log(z))


def sigma_prime(z: float, alpha: float, tau: float, c: float) -> float:
    a2 = alpha * alpha
    return 2 * alpha * tau / (1 - a2 * z * z) + 2 * alpha / (z * z - a2) - c / z


def sigma_second(z: float, alpha: float, tau: float, c: float) -> float:
    a2 = alpha * alpha
    return (4 * alpha * z * (a2 * tau / (1 - a2 * z * z) ** 2 - 1 / (z * z - a2) ** 2)
            + c / (z * z))


def sigma_third_closed(z0: float, alpha: float) -> float:
    """``sigma'''(z0)`` in closed form, valid at the double critical point."""
    a = alpha
    a2, a4, z2 = a * a, a ** 4, z0 * z0
    num = 4 * a * (1 - a4) * ((1 + a4) * z2 + 3 * a2 * (1 + z2 * z2))
    return num / ((1 - a4 * z2 * z2) * (z2 - a2) ** 3)


@dataclass(frozen=True)
class ScalingConstants:
    alpha: float
    tau: float
    z0: float
    c: float
    sigma3: float
    g: float

    @property
    def c1(self) -> float:
        return self.c

    @property
    def c2(self) -> float:
        return 1.0 / self.g

    def line(self) -> str:
        return (f"z0={self.z0:.15g} c1={self.c1:.15g} c2={self.c2:.15g} "
                f"g={self.g:.15g} sigma3={self.sigma3:.15g}")


def constants(alpha: float, tau: float) -> ScalingConstants:
    a, t = _check(alpha, tau)
    z0 = saddle_z0(a, t)
    a2 = a * a
    c = 2 * a * z0 * (t / (1 - a2 * z0 * z0) + 1 / (z0 * z0 - a2))
    s3 = sigma_third_closed(z0, a)
    if not s3 > 0:
        raise DomainError("third derivative at the saddle is not positive")
    g = (2 / s3) ** (1 / 3) / z0
    return ScalingConstants(a, t, z0, c, s3, g)


def c_alternative(z0: float, alpha: float) -> float:
    """The centering constant written through z0 alone."""
    a2 = alpha * alpha
    return 4 * alpha * (1 - a2 * a2) * z0 ** 3 / ((1 + a2 * z0 * z0) * (z0 * z0 - a2) ** 2)


def tau1_closed_form(alpha: float) -> tuple[float, float]:
    """``(c1, c2)`` for square matrices."""
    a = float(alpha)
    if not 0 < a < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    a2 = a * a
    c1 = 4 * a / (1 - a2)
    c2 = (2 * a * (1 + 6 * a2 + a2 * a2)) ** (1 / 3) / (1 - a2)
    return c1, c2
