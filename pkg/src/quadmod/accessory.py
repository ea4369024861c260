"""Accessory parameters of the exterior Schwarz-Christoffel map.

For a convex quadrilateral with exterior angles ``pi*(1 + alpha)`` etc. and
prevertices 0, 1, t, infinity, the map has a double pole at some ``z0`` in
the upper half-plane. The residue there vanishes iff

    alpha/z0 + beta/(z0 - 1) + gamma/(z0 - t) = 1/(i*Im z0),

which has exactly one solution with ``Im z0 > 0``. Its real part is a root
of a cubic, and ``|z0|^2`` is a rational function ``rho`` of that root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

from .errors import DomainError, PoleError, RootSelectionError

__all__ = [
    "AngleParams",
    "AccessorySolution",
    "cubic_coeffs",
    "cubic_real_roots",
    "rho",
    "solve_pole",
    "residue_defect",
]

ANGLE_MIN, ANGLE_MAX = 0.01, 0.99


@dataclass(frozen=True)
class AngleParams:
    """Exterior-angle parameters of a convex quadrilateral.

    The exterior angle at vertex j is ``pi * (1 + param_j)``; convexity
    requires every parameter in (0, 1) and their sum to be 2.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.delta)
        if abs(sum(vals) - 2.0) > 1e-12:
            raise DomainError(f"angle parameters must sum to 2, got {sum(vals)!r}")
        for name, v in zip(("alpha", "beta", "gamma", "delta"), vals):
            if not ANGLE_MIN < v < ANGLE_MAX:
                raise DomainError(
                    f"{name}={v!r} outside ({ANGLE_MIN}, {ANGLE_MAX}); "
                    "polygon is non-convex or degenerate"
                )

    @classmethod
    def from_three(cls, alpha: float, beta: float, gamma: float) -> "AngleParams":
        return cls(alpha, beta, gamma, 2.0 - alpha - beta - gamma)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class AccessorySolution:
    t: float
    x0: float
    y0: float
    residual: float

    @property
    def z0(self) -> complex:
        return complex(self.x0, self.y0)


def _check_t(t: float):
    if not t > 1:
        raise DomainError(f"prevertex t must exceed 1, got {t}")


def cubic_coeffs(angles: AngleParams, t: float) -> Tuple[float, float, float, float]:
    """Coefficients (A, B, C, D) of the cubic satisfied by ``Re z0``."""
    _check_t(t)
    a, b, c = angles.alpha, angles.beta, angles.gamma
    E = a + b + c - 1.0
    A = 2.0 * (E - 1.0) ** 2
    B = (E - 1.0) * (4.0 - 3.0 * (a + c) + (4.0 - 3.0 * (a + b)) * t)
    C = (
        2.0 - 3.0 * (a + c) + (a + c) ** 2
        + 2.0 * (3.0 - 5.0 * a - 2.0 * b - 2.0 * c
                 + 2.0 * a * a + 2.0 * a * b + 2.0 * a * c + b * c) * t
        + (2.0 - 3.0 * (a + b) + (a + b) ** 2) * t * t
    )
    D = (1.0 - a) * (a + c - 1.0 + (a + b - 1.0) * t) * t
    return A, B, C, D


def cubic_real_roots(A: float, B: float, C: float, D: float) -> List[float]:
    """Real roots of ``A x^3 + B x^2 + C x + D`` (A != 0).

    Closed form (trigonometric for three real roots, Cardano otherwise),
    each root then polished by Newton steps on the monic cubic. Complex
    pairs with a negligible imaginary part are kept as a double root.
    """
    if A == 0:
        raise DomainError("leading coefficient vanishes")
    b, c, d = B / A, C / A, D / A
    # x = scale * y puts the roots of the monic cubic in y at unit size, so
    # the discriminant neither underflows nor overflows
    scale = max(abs(b), math.sqrt(abs(c)), abs(d) ** (1.0 / 3.0))
    if scale == 0:
        return [0.0, 0.0, 0.0]
    bn, cn, dn = b / scale, c / scale / scale, d / scale / scale / scale
    shift = bn / 3.0
    p = cn - bn * bn / 3.0
    q = 2.0 * bn ** 3 / 27.0 - bn * cn / 3.0 + dn
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    roots: List[float] = []
    if p == 0 and q == 0:
        roots = [-shift] * 3
    elif disc <= 0 and p < 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
    else:
        sq = math.sqrt(max(disc, 0.0))
        u = math.copysign(abs(-q / 2.0 + sq) ** (1.0 / 3.0), -q / 2.0 + sq)
        v = math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
        roots = [u + v - shift]
        # complex pair -(u+v)/2 +- i*sqrt(3)/2*(u-v)
        if abs(u - v) * math.sqrt(3.0) / 2.0 <= 1e-7:
            roots += [-(u + v) / 2.0 - shift] * 2
    roots = [scale * y for y in roots]

    polished = []
    for x in roots:
        for _ in range(3):
            f = ((x + b) * x + c) * x + d
            df = (3.0 * x + 2.0 * b) * x + c
            if df == 0:
                break
            step = f / df
            x_new = x - step
            f_new = ((x_new + b) * x_new + c) * x_new + d
            if abs(f_new) >= abs(f):
                break
            x = x_new
        polished.append(x)
    return sorted(polished)


def _rho_parts(x: float, angles: AngleParams, t: float) -> Tuple[float, float]:
    a, b, c = angles.alpha, angles.beta, angles.gamma
    E = a + b + c - 1.0
    r1 = a * t * x
    r2 = (1.0 - E) * x + E * (t + 1.0) - c * t - b
    return r1, r2


def rho(x: float, angles: AngleParams, t: float) -> float:
    """``|z0|^2`` as a function of ``x0 = Re z0``."""
    _check_t(t)
    r1, r2 = _rho_parts(x, angles, t)
    if r2 == 0:
        raise PoleError(f"rho has a pole at x = {x}")
    return r1 / r2


def residue_defect(z0: complex, angles: AngleParams, t: float) -> float:
    """Absolute defect of the vanishing-residue equation at ``z0``."""
    y = z0.imag
    if not y > 0:
        raise DomainError(f"z0 must lie in the upper half-plane, got {z0}")
    lhs = angles.alpha / z0 + angles.beta / (z0 - 1.0) + angles.gamma / (z0 - t)
    return abs(lhs - 1.0 / complex(0.0, y))


def _polish(z: complex, angles: AngleParams, t: float) -> complex:
    """Newton steps on the residue equation in (Re z, Im z)."""
    a, b, c = angles.alpha, angles.beta, angles.gamma
    best, best_res = z, residue_defect(z, angles, t)
    for _ in range(3):
        y = z.imag
        G = a / z + b / (z - 1.0) + c / (z - t) + 1j / y
        dS = -a / z ** 2 - b / (z - 1.0) ** 2 - c / (z - t) ** 2
        gx = dS
        gy = 1j * dS - 1j / (y * y)
        det = gx.real * gy.imag - gy.real * gx.imag
        if det == 0:
            break
        dx = (G.real * gy.imag - gy.real * G.imag) / det
        dy = (gx.real * G.imag - G.real * gx.imag) / det
        z = complex(z.real - dx, y - dy)
        if not z.imag > 0:
            break
        res = residue_defect(z, angles, t)
        if res >= best_res:
            break
        best, best_res = z, res
    return best


def solve_pole(angles: AngleParams, t: float) -> AccessorySolution:
    """The unique pole ``z0`` in the upper half-plane for given angles and t."""
    coeffs = cubic_coeffs(angles, t)
    candidates = []
    for x in cubic_real_roots(*coeffs):
        r1, r2 = _rho_parts(x, angles, t)
        # cleared-denominator form of x^2 < rho(x); rejects 0/0 points
        lhs, rhs = r2 * r2 * x * x, r1 * r2
        if lhs < rhs:
            margin = (rhs - lhs) / max(abs(rhs), abs(lhs), 1e-300)
            candidates.append((x, r1 / r2, margin))

    if not candidates:
        raise RootSelectionError(
            f"no cubic root satisfies x^2 < rho(x) for angles={angles.as_tuple()}, t={t}"
        )

    solutions = []
    for x, rho_x, margin in candidates:
        y = math.sqrt(rho_x - x * x)
        if y <= 0:
            continue
        z = _polish(complex(x, y), angles, t)
        x, y = z.real, z.imag
        solutions.append((residue_defect(z, angles, t), margin, x, y))
    if not solutions:
        raise RootSelectionError(f"selected root gives Im z0 = 0 (t={t})")
    if len(solutions) > 1:
        solid = [s for s in solutions if s[1] >= 1e-12]
        if len(solid) > 1:
            raise RootSelectionError(
                f"{len(solid)} cubic roots pass the selection predicate at t={t}"
            )
    res, _, x, y = min(solutions)
    return AccessorySolution(t=t, x0=x, y0=y, residual=res)
