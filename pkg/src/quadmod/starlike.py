"""Upper bound for the reflection coefficient from strong starlikeness.

A domain that is strongly starlike of order ``alpha`` about some centre has a
boundary admitting a ``K(alpha)``-quasiconformal reflection, with
``K(alpha) = (1 + sin(pi alpha/2)) / (1 - sin(pi alpha/2))``. The order is
read off the radial function ``R(theta)`` through
``tan(pi alpha / 2) = sup |R'| / R``. For the trapezoid of height 1 with
half-bases ``c <= d`` centred at ``-i s`` the supremum has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "StarlikeReport",
    "K_of_order",
    "order_of_center",
    "order_tangent",
    "qr_upper",
    "radial_function",
]


@dataclass(frozen=True)
class StarlikeReport:
    s: float
    alpha_order: float
    tau: float
    qr_upper: float


def K_of_order(alpha: float) -> float:
    """Distortion of the quasiconformal extension of order ``alpha``."""
    if not 0 < alpha < 1:
        raise DomainError(f"order must lie in (0, 1), got {alpha}")
    s = math.sin(0.5 * math.pi * alpha)
    return (1.0 + s) / (1.0 - s)


def _check(s: float, c: float, d: float):
    if not 0 < s < 1:
        raise DomainError(f"centre parameter s must lie in (0, 1), got {s}")
    if not 0 < c <= d:
        raise DomainError(f"need 0 < c <= d, got c={c}, d={d}")


def order_tangent(s: float, c: float, d: float) -> float:
    """``sup |R'|/R`` for the centre ``-i s``.

    The four candidates are taken as they stand; the last one may be
    negative, in which case it never attains the maximum.
    """
    _check(s, c, d)
    w = d - c
    den = c + w * s
    return max(c / s, d / (1.0 - s), (1.0 - s + w * d) / den, (s - w * c) / den)


def order_of_center(s: float, c: float, d: float) -> float:
    """Order of strong starlikeness of the trapezoid about ``-i s``."""
    return 2.0 / math.pi * math.atan(order_tangent(s, c, d))


def qr_upper(c: float, d: float) -> StarlikeReport:
    """Bound ``(sqrt(1 + tau^2) + tau)^2`` with the centre at ``s = c/(c+d)``."""
    if not 0 < c <= d:
        raise DomainError(f"need 0 < c <= d, got c={c}, d={d}")
    s = c / (c + d)
    tau = max(c + d, (1.0 - c * c + d * d) / (2.0 * c))
    bound = (math.hypot(1.0, tau) + tau) ** 2
    return StarlikeReport(s=s, alpha_order=2.0 / math.pi * math.atan(tau),
                          tau=tau, qr_upper=bound)


def radial_function(theta, s: float, c: float, d: float):
    """Distance from ``-i s`` to the boundary in direction ``theta``.

    Defined for ``-pi/2 < theta < pi/2``; the other half follows by symmetry
    in the imaginary axis. Accepts scalars or arrays.
    """
    _check(s, c, d)
    th = np.asarray(theta, dtype=float)
    if np.any(np.abs(th) >= 0.5 * math.pi):
        raise DomainError("theta must lie in (-pi/2, pi/2)")
    th1 = math.atan2(s, c)
    th2 = math.atan2(1.0 - s, d)
    sin, cos = np.sin(th), np.cos(th)
    with np.errstate(divide="ignore", invalid="ignore"):
        top = s / sin
        side = ((1.0 - s) * c + s * d) / (cos + (d - c) * sin)
        bottom = (1.0 - s) / (-sin)
    out = np.where(th > th1, top, np.where(th < -th2, bottom, side))
    return float(out) if out.ndim == 0 else out
