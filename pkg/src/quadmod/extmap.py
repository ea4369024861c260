"""Exterior conformal modulus of a convex polygonal quadrilateral.

The quadrilateral is normalised to ``A1 = 1, A2 = 0, A3, A4`` (positive
orientation). The exterior is the image of the upper half-plane under

    f(z) = 1 - h(z) / h(1),
    h(z) = int_0^z x^alpha (1-x)^beta (1-x/t)^gamma / ((1-x/z0)^2 (1-x/conj(z0))^2) dx,

with prevertices 0, 1, t, infinity. For fixed angles the side ratio
``|A2 A3| / |A1 A2| = J2 / J1`` grows strictly with ``t``, so ``t`` is found by
bisection and the modulus follows from ``K(r') / K(r)`` with ``r = 1/sqrt(t)``.
"""

from __future__ import annotations

import csv
import math
import cmath
from dataclasses import dataclass
from typing import Iterable, List, Optional, TextIO, Tuple

import numpy as np

from .accessory import AccessorySolution, AngleParams, solve_pole
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    GeometryError,
    PoleError,
)
from .specfun import QuadratureSpec, agm, beta, lauricella_fd, quad

__all__ = [
    "QuadSpec",
    "SolverOptions",
    "ModulusReport",
    "BisectionResult",
    "GridPoint",
    "angles_from_vertices",
    "side_integrals",
    "side_ratio",
    "solve_t",
    "modulus_from_t",
    "exterior_modulus",
    "conjugate",
    "side_lengths",
    "vertices_from",
    "h1_value",
    "I_value",
    "h_value",
    "map_point",
    "grid_image",
    "write_grid_csv",
]

MAX_BRACKET_EXPONENT = 6
RESIDUE_TOL = 1e-10
CLOSURE_TOL = 1e-8


@dataclass(frozen=True)
class QuadSpec:
    """Quadrilateral with ``A1 = 1`` and ``A2 = 0``; only A3, A4 vary.

    The vertex order 1, 0, A3, A4 runs clockwise around the polygon, which
    is the positive direction for its exterior.
    """

    A3: complex
    A4: complex

    def __post_init__(self):
        a3, a4 = complex(self.A3), complex(self.A4)
        object.__setattr__(self, "A3", a3)
        object.__setattr__(self, "A4", a4)
        if not all(math.isfinite(v) for v in (a3.real, a3.imag, a4.real, a4.imag)):
            raise GeometryError("vertices must be finite")
        pts = self.vertices
        for k in range(4):
            e1 = pts[(k + 1) % 4] - pts[k]
            e2 = pts[(k + 2) % 4] - pts[(k + 1) % 4]
            # clockwise turn at every vertex: positive orientation of the exterior
            if (e1.conjugate() * e2).imag >= 0:
                raise GeometryError(
                    f"vertices 1, 0, {a3}, {a4} do not bound a strictly convex "
                    "polygon traversed clockwise"
                )

    @property
    def vertices(self) -> Tuple[complex, complex, complex, complex]:
        return (1.0 + 0j, 0j, self.A3, self.A4)


@dataclass(frozen=True)
class SolverOptions:
    """Bisection controls.

    Attributes
    ----------
    n : float
        Upper bracket exponent, the search interval is ``[1, 10**n]``.
    wp : int
        Quadrature tolerance exponent (relative tolerance ``10**-wp``).
    max_iter : int
        Hard cap on bisection steps.
    escalate : bool
        Retry with ``n + 1`` (up to 6) when the target is not bracketed.
    """

    n: float = 2.0
    wp: int = 12
    max_iter: int = 200
    escalate: bool = True

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"bracket exponent n must be positive, got {self.n}")
        if self.wp < 8:
            raise DomainError(f"wp must be at least 8, got {self.wp}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be positive, got {self.max_iter}")

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec.from_digits(self.wp)


@dataclass(frozen=True)
class BisectionResult:
    t: float
    pole: AccessorySolution
    l2: float
    J1: float
    J2: float
    iterations: int
    n: float
    max_residual: float
    quad_error: float

    @property
    def z0(self) -> complex:
        return self.pole.z0


@dataclass(frozen=True)
class ModulusReport:
    """Exterior modulus together with every solved parameter."""

    M: float
    angles: AngleParams
    t: float
    z0: complex
    l2: float
    l3: float
    l4: float
    r: float
    iterations: int
    n: float
    residual: float
    quad_error: float
    closure_defect: float
    A3: complex
    A4: complex
    l1: float = 1.0

    def as_dict(self) -> dict:
        a = self.angles
        return {
            "M": self.M,
            "alpha": a.alpha, "beta": a.beta, "gamma": a.gamma, "delta": a.delta,
            "t": self.t, "r": self.r,
            "z0_re": self.z0.real, "z0_im": self.z0.imag,
            "l1": self.l1, "l2": self.l2, "l3": self.l3, "l4": self.l4,
        }


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def angles_from_vertices(q: QuadSpec) -> AngleParams:
    """Exterior-angle parameters from principal-value arguments of the sides."""
    a = cmath.phase(q.A4 - 1.0) / math.pi
    b = 1.0 - cmath.phase(q.A3) / math.pi
    c = 1.0 - b - cmath.phase(q.A4 - q.A3) / math.pi
    d = 2.0 - a - b - c
    for name, v in zip(("alpha", "beta", "gamma", "delta"), (a, b, c, d)):
        if not 0.0 < v < 1.0:
            raise GeometryError(f"{name} = {v} outside (0, 1): quadrilateral is not convex")
    return AngleParams(a, b, c, d)


def side_lengths(angles: AngleParams, l2: float) -> Tuple[float, float]:
    """Lengths ``|A3 A4|`` and ``|A4 A1|`` given ``|A1 A2| = 1`` and ``l2``."""
    if not l2 > 0:
        raise DomainError(f"l2 must be positive, got {l2}")
    pi = math.pi
    a, b, c, d = angles.as_tuple()
    sd = math.sin(pi * d)
    l3 = (math.sin(pi * a) + l2 * math.sin(pi * (a + b))) / sd
    l4 = (math.sin(pi * (b + c)) + l2 * math.sin(pi * c)) / sd
    return l3, l4


def _vertices_with_defect(angles: AngleParams, l2: float):
    l3, l4 = side_lengths(angles, l2)
    pi = math.pi
    A3 = -l2 * cmath.exp(-1j * pi * angles.beta)
    A4 = A3 - l3 * cmath.exp(-1j * pi * (angles.beta + angles.gamma))
    A4_alt = 1.0 + l4 * cmath.exp(1j * pi * angles.alpha)
    return A3, A4, abs(A4 - A4_alt)


def vertices_from(angles: AngleParams, l2: float) -> Tuple[complex, complex]:
    """Vertices A3, A4 reconstructed from the angles and ``l2``.

    Raises
    ------
    GeometryError
        If the two ways of reaching A4 disagree by more than
        ``1e-8 * (1 + |A4|)``.
    """
    A3, A4, defect = _vertices_with_defect(angles, l2)
    if defect > CLOSURE_TOL * (1.0 + abs(A4)):
        raise GeometryError(f"polygon does not close: defect {defect:.3g}")
    return A3, A4


def conjugate(q: QuadSpec) -> QuadSpec:
    """The conjugate quadrilateral ``(A2, A3, A4, A1)``, renormalised.

    Its exterior modulus is the reciprocal of the exterior modulus of ``q``.
    """
    A1, A2, A3, A4 = q.vertices
    scale = A2 - A3
    return QuadSpec((A4 - A3) / scale, (A1 - A3) / scale)


# ---------------------------------------------------------------------------
# Side integrals and bisection
# ---------------------------------------------------------------------------


def _abs_denominator(x, z0: complex):
    """``|1 - x/z0|^4`` for real ``x``."""
    dx = z0.real - x
    return ((dx * dx + z0.imag * z0.imag) / abs(z0) ** 2) ** 2


def _side_integrals(angles: AngleParams, t: float, z0: complex,
                    spec: QuadratureSpec) -> Tuple[float, float, float]:
    a, b, c = angles.alpha, angles.beta, angles.gamma

    def f1(x, dx0, dx1):
        return ((t - x) / t) ** c / _abs_denominator(x, z0)

    def f2(x, dx0, dx1):
        return x ** a * t ** (-c) / _abs_denominator(x, z0)

    J1, e1 = quad(f1, 0.0, 1.0, spec, weight=(a, b), gaps=True)
    J2, e2 = quad(f2, 1.0, t, spec, weight=(b, c), gaps=True)
    return float(J1), float(J2), float(e1 / J1 + e2 / J2)


def side_integrals(angles: AngleParams, t: float, z0: complex,
                   spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """The integrals J1 over (0, 1) and J2 over (1, t) of ``|h'|`` on the axis."""
    if not t > 1:
        raise DomainError(f"t must exceed 1, got {t}")
    J1, J2, _ = _side_integrals(angles, t, complex(z0), spec or SolverOptions().quadrature)
    return J1, J2


def side_ratio(angles: AngleParams, t: float,
               spec: Optional[QuadratureSpec] = None) -> float:
    """``l2 = J2 / J1`` at prevertex ``t`` (pole solved internally)."""
    pole = solve_pole(angles, t)
    J1, J2 = side_integrals(angles, t, pole.z0, spec)
    return J2 / J1


def _evaluate(angles, t, spec):
    pole = solve_pole(angles, t)
    if pole.residual > RESIDUE_TOL:
        raise ConvergenceError(
            f"residue defect {pole.residual:.3g} exceeds {RESIDUE_TOL} at t={t}"
        )
    J1, J2, qerr = _side_integrals(angles, t, pole.z0, spec)
    return pole, J1, J2, qerr


def solve_t(angles: AngleParams, L: float,
            opts: Optional[SolverOptions] = None) -> BisectionResult:
    """Prevertex ``t`` in ``[1, 10**n]`` at which ``J2/J1`` equals ``L``.

    Bisection over ``floor(5 (n + 15))`` steps (or ``opts.max_iter`` if
    smaller), stopping early once the bracket is narrower than
    ``1e-13 (1 + t)``.

    Raises
    ------
    BracketError
        If ``J2/J1 < L`` already at ``t = 10**n``.
    """
    opts = opts or SolverOptions()
    if not L > 0:
        raise DomainError(f"target side length must be positive, got {L}")
    spec = opts.quadrature
    t1, t2 = 1.0, 10.0 ** opts.n
    pole, J1, J2, _ = _evaluate(angles, t2, spec)
    if J2 / J1 < L:
        raise BracketError(
            f"side ratio {J2 / J1:.6g} at t=1e{opts.n:g} is below the target {L:.6g}"
        )

    steps = min(int(math.floor(5 * (opts.n + 15))), opts.max_iter)
    max_res = 0.0
    done = 0
    for done in range(1, steps + 1):
        t = 0.5 * (t1 + t2)
        pole, J1, J2, _ = _evaluate(angles, t, spec)
        max_res = max(max_res, pole.residual)
        if J2 / J1 < L:
            t1 = t
        else:
            t2 = t
        if t2 - t1 < 1e-13 * (1.0 + t):
            break

    t = 0.5 * (t1 + t2)
    pole, J1, J2, qerr = _evaluate(angles, t, spec)
    max_res = max(max_res, pole.residual)
    return BisectionResult(
        t=t, pole=pole, l2=J2 / J1, J1=J1, J2=J2, iterations=done,
        n=opts.n, max_residual=max_res, quad_error=qerr,
    )


def modulus_from_t(t: float) -> float:
    """``K(r') / K(r)`` with ``r = 1/sqrt(t)``."""
    if not t > 1:
        raise DomainError(f"t must exceed 1, got {t}")
    r = 1.0 / math.sqrt(t)
    rp = math.sqrt((t - 1.0) / t)
    # K(r') / K(r) = agm(1, r') / agm(1, r)
    return agm(1.0, rp) / agm(1.0, r)


def exterior_modulus(q: QuadSpec, opts: Optional[SolverOptions] = None) -> ModulusReport:
    """Exterior conformal modulus of the quadrilateral ``(1, 0, A3, A4)``."""
    opts = opts or SolverOptions()
    angles = angles_from_vertices(q)
    L = abs(q.A3)
    n = opts.n
    while True:
        try:
            sol = solve_t(angles, L, SolverOptions(n, opts.wp, opts.max_iter, opts.escalate))
            break
        except BracketError:
            if not opts.escalate or n + 1 > MAX_BRACKET_EXPONENT:
                raise
            n += 1
    l3, l4 = side_lengths(angles, sol.l2)
    A3, A4, defect = _vertices_with_defect(angles, sol.l2)
    return ModulusReport(
        M=modulus_from_t(sol.t), angles=angles, t=sol.t, z0=sol.z0,
        l2=sol.l2, l3=l3, l4=l4, r=1.0 / math.sqrt(sol.t),
        iterations=sol.iterations, n=n, residual=sol.max_residual,
        quad_error=sol.quad_error, closure_defect=defect, A3=q.A3, A4=q.A4,
    )


# ---------------------------------------------------------------------------
# Hypergeometric forms of h(1) and I
# ---------------------------------------------------------------------------


def h1_value(angles: AngleParams, t: float, z0: complex,
             spec: Optional[QuadratureSpec] = None) -> complex:
    """``h(1)`` as a Lauricella ``F_D^(3)`` value."""
    a, b, c = angles.alpha, angles.beta, angles.gamma
    z0 = complex(z0)
    fd = lauricella_fd(1 + a, (-c, 2.0, 2.0), 2 + a + b,
                       (1.0 / t, 1.0 / z0, 1.0 / z0.conjugate()), spec)
    return beta(1 + a, 1 + b) * complex(fd)


def I_value(angles: AngleParams, t: float, z0: complex,
            spec: Optional[QuadratureSpec] = None) -> complex:
    """The integral over (1, t) in ``l2 = I / h(1)``, via ``F_D^(3)``."""
    a, b, c = angles.alpha, angles.beta, angles.gamma
    z0 = complex(z0)
    s = t - 1.0
    pref = s ** (1 + b + c) * abs(z0) ** 4 / (t ** c * abs(z0 - 1.0) ** 4)
    fd = lauricella_fd(1 + b, (-a, 2.0, 2.0), 2 + b + c,
                       (-s, s / (z0 - 1.0), s / (z0.conjugate() - 1.0)), spec)
    return pref * beta(1 + b, 1 + c) * complex(fd)


# ---------------------------------------------------------------------------
# The mapping function
# ---------------------------------------------------------------------------


def _den(x, z0: complex):
    return ((1.0 - x / z0) * (1.0 - x / z0.conjugate())) ** 2


def _integrand(x, angles: AngleParams, t: float, z0: complex):
    """``h'(x)`` on the closed upper half-plane, branches by explicit arguments."""
    x = np.asarray(x, dtype=complex)
    a, b, c = angles.alpha, angles.beta, angles.gamma
    u, v = x.real, x.imag
    log_x = np.log(np.abs(x)) + 1j * np.arctan2(v, u)
    w1 = 1.0 - x
    log_1 = np.log(np.abs(w1)) - 1j * np.arctan2(v, 1.0 - u)
    wt = 1.0 - x / t
    log_t = np.log(np.abs(wt)) - 1j * np.arctan2(v / t, 1.0 - u / t)
    return np.exp(a * log_x + b * log_1 + c * log_t) / _den(x, z0)


def _segment(p: complex, q: complex, angles, t, z0, spec) -> complex:
    """Integral of ``h'`` along the straight segment from p to q."""
    d = q - p
    val, _ = quad(lambda s: _integrand(p + s * d, angles, t, z0) * d, 0.0, 1.0, spec)
    return complex(val)


def _from_origin(q: complex, angles, t, z0, spec) -> complex:
    """Segment integral from 0 to ``q`` with the ``x**alpha`` factor as a weight."""
    a, b, c = angles.alpha, angles.beta, angles.gamma
    q = complex(q)
    q_pow = cmath.exp((1 + a) * (math.log(abs(q)) + 1j * math.atan2(q.imag, q.real)))

    def f(s):
        x = s * q
        u, v = x.real, x.imag
        log_1 = np.log(np.abs(1.0 - x)) - 1j * np.arctan2(v, 1.0 - u)
        log_t = np.log(np.abs(1.0 - x / t)) - 1j * np.arctan2(v / t, 1.0 - u / t)
        return np.exp(b * log_1 + c * log_t) / _den(x, z0)

    val, _ = quad(f, 0.0, 1.0, spec, weight=(a, 0.0))
    return q_pow * complex(val)


def _arc(centre: complex, r: float, th0: float, th1: float, angles, t, z0, spec) -> complex:
    def f(th):
        e = np.exp(1j * th)
        return _integrand(centre + r * e, angles, t, z0) * 1j * r * e

    val, _ = quad(f, th0, th1, spec)
    return complex(val)


def _h_real(x: float, angles: AngleParams, t: float, z0: complex,
            spec: QuadratureSpec, J: Optional[Tuple[float, float]] = None) -> complex:
    """``h(x)`` for real ``x`` approached from the upper half-plane."""
    a, b, c = angles.alpha, angles.beta, angles.gamma
    pi = math.pi
    if x == 0:
        return 0j
    if x < 0:
        def f(s):
            return (1.0 - s) ** b * (1.0 - s / t) ** c / _abs_denominator(s, z0)
        val, _ = quad(f, x, 0.0, spec, weight=(0.0, a))
        return -cmath.exp(1j * pi * a) * float(val)
    if x <= 1:
        def f(s, d0, d1):
            return (1.0 - s) ** b * (1.0 - s / t) ** c / _abs_denominator(s, z0) \
                if x < 1 else ((t - s) / t) ** c / _abs_denominator(s, z0)
        val, _ = quad(f, 0.0, x, spec, weight=(a, b if x == 1 else 0.0), gaps=True)
        return complex(float(val))
    J1, J2 = J if J is not None else _side_integrals(angles, t, z0, spec)[:2]
    if x <= t:
        if x == t:
            part = J2
        else:
            def f(s):
                return s ** a * (1.0 - s / t) ** c / _abs_denominator(s, z0)
            part, _ = quad(f, 1.0, x, spec, weight=(b, 0.0))
        return J1 + cmath.exp(-1j * pi * b) * float(part)

    def f(s):
        return s ** a * (s - 1.0) ** b * t ** (-c) / _abs_denominator(s, z0)
    part, _ = quad(f, t, x, spec, weight=(c, 0.0))
    return (J1 + cmath.exp(-1j * pi * b) * J2
            + cmath.exp(-1j * pi * (b + c)) * float(part))


def h_value(z: complex, angles: AngleParams, t: float, z0: complex,
            spec: Optional[QuadratureSpec] = None,
            J: Optional[Tuple[float, float]] = None) -> complex:
    """``h(z)`` along the segment ``[0, z]``, detouring around the pole ``z0``.

    Near the pole the segment is replaced by an arc of the circle about
    ``z0`` of radius ``min(0.1, |z - z0|/2, Im z0 / 2)``. The integrand has
    zero residue at ``z0``, so the choice of arc does not change the value.
    """
    spec = spec or SolverOptions().quadrature
    z, z0 = complex(z), complex(z0)
    if z.imag < 0:
        raise DomainError(f"z must lie in the closed upper half-plane, got {z}")
    if z == z0:
        raise PoleError(f"z coincides with the pole {z0}")
    if z.imag == 0:
        return _h_real(z.real, angles, t, z0, spec, J)

    r = min(0.1, abs(z - z0) / 2.0, z0.imag / 2.0)
    zz = abs(z) ** 2
    s_star = (z0 * z.conjugate()).real / zz
    closest = min(max(s_star, 0.0), 1.0) * z
    dist = abs(z0 - closest)
    if dist >= r:
        return _from_origin(z, angles, t, z0, spec)

    half = math.sqrt(r * r - dist * dist) / math.sqrt(zz)
    p_in, p_out = (s_star - half) * z, (s_star + half) * z
    th0 = cmath.phase(p_in - z0)
    dth = math.remainder(cmath.phase(p_out - z0) - th0, 2 * math.pi)
    return (_from_origin(p_in, angles, t, z0, spec)
            + _arc(z0, r, th0, th0 + dth, angles, t, z0, spec)
            + _segment(p_out, z, angles, t, z0, spec))


def map_point(z: complex, angles: AngleParams, t: float, z0: complex,
              spec: Optional[QuadratureSpec] = None,
              J: Optional[Tuple[float, float]] = None) -> complex:
    """Image ``f(z) = 1 - h(z)/h(1)`` of a point of the closed upper half-plane.

    ``J`` may carry precomputed ``(J1, J2)`` to avoid recomputing them for
    every point of a grid.
    """
    spec = spec or SolverOptions().quadrature
    z0 = complex(z0)
    if J is None:
        J = _side_integrals(angles, t, z0, spec)[:2]
    return 1.0 - h_value(z, angles, t, z0, spec, J) / J[0]


@dataclass(frozen=True)
class GridPoint:
    z: complex
    w: complex
    skipped: bool = False


def grid_image(angles: AngleParams, t: float, z0: complex,
               re_range: Tuple[float, float], im_range: Tuple[float, float],
               nx: int, ny: int, spec: Optional[QuadratureSpec] = None,
               skip_radius: float = 1e-3) -> List[GridPoint]:
    """Images of an ``nx`` by ``ny`` mesh of the upper half-plane.

    Points within ``skip_radius`` of the pole are not mapped; they come back
    with ``skipped=True`` and a NaN image.
    """
    if nx < 1 or ny < 1:
        raise DomainError("grid needs at least one point in each direction")
    if im_range[0] < 0 or im_range[1] < 0:
        raise DomainError("grid must lie in the closed upper half-plane")
    spec = spec or SolverOptions().quadrature
    z0 = complex(z0)
    J = _side_integrals(angles, t, z0, spec)[:2]
    out = []
    for y in np.linspace(im_range[0], im_range[1], ny):
        for x in np.linspace(re_range[0], re_range[1], nx):
            z = complex(x, y)
            if abs(z - z0) < skip_radius:
                out.append(GridPoint(z, complex(math.nan, math.nan), True))
            else:
                out.append(GridPoint(z, map_point(z, angles, t, z0, spec, J)))
    return out


def write_grid_csv(points: Iterable[GridPoint], fh: TextIO) -> None:
    """Write grid points as CSV with columns re_z, im_z, re_w, im_w, skipped."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["re_z", "im_z", "re_w", "im_w", "skipped"])
    for p in points:
        w.writerow([repr(p.z.real), repr(p.z.imag), repr(p.w.real), repr(p.w.imag),
                    int(p.skipped)])
