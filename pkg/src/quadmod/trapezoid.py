"""Interior and exterior moduli of an isosceles trapezoid and M_L bounds.

The trapezoid has height 1, top base ``[-c, c]`` on the real axis and bottom
base ``[-d - i, d - i]``, with acute angle ``pi*alpha`` so that
``d - c = cot(pi*alpha)``. Its vertices ``A1 = -d - i, A2 = -c, A3 = c,
A4 = d - i`` are the images of ``-1/lam, -1, 1, 1/lam`` under the interior
Schwarz-Christoffel map and of ``-b, -a, a, b`` (with ``k = a/b``) under the
exterior map whose pole sits at ``i``.

Both parameters are found by bisection on ``log p`` with
``p = K(m')/K(m)``; the complementary modulus then comes from theta
functions at full relative precision, which keeps the integrands accurate
when the modulus is close to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, brentq

from .errors import BracketError, DomainError
from .specfun import (
    QuadratureSpec,
    appell_f1,
    beta,
    ellip_K,
    ellip_KE,
    ellip_Kp,
    hyp2f1,
    lauricella_fd,
    moduli_from_ratio,
    quad,
)

__all__ = [
    "TrapezoidSpec",
    "BoundsReport",
    "interior_integrals",
    "interior_lambda",
    "interior_lambda_rectangle",
    "interior_modulus",
    "interior_ratio_hypergeometric",
    "exterior_a_of_k",
    "exterior_integrals",
    "exterior_k",
    "exterior_k_rectangle",
    "exterior_modulus",
    "exterior_ratio_appell",
    "ml_natural",
    "g_function",
    "lambda0",
    "rectangle_lower_bound",
    "C_alpha",
    "ml_shifted",
    "qr_lower",
    "boundary_interior",
    "boundary_exterior",
    "ml_enhanced",
    "bounds",
]

DEFAULT_SPEC = QuadratureSpec(abs_tol=1e-16, rel_tol=1e-13, max_levels=12)
_XTOL = 1e-14


@dataclass(frozen=True)
class TrapezoidSpec:
    """Isosceles trapezoid of height 1.

    Attributes
    ----------
    alpha : float
        Acute angle divided by pi, in (0, 1/2].
    c, d : float
        Half-lengths of the short and long bases.
    """

    alpha: float
    c: float
    d: float

    def __post_init__(self):
        a, c, d = self.alpha, self.c, self.d
        if not 0 < a <= 0.5:
            raise DomainError(f"alpha must lie in (0, 1/2], got {a}")
        if not 0 < c <= d:
            raise DomainError(f"need 0 < c <= d, got c={c}, d={d}")
        if a < 0.5 and not c < d:
            raise DomainError("c = d is only possible for a rectangle (alpha = 1/2)")
        if a == 0.5 and c != d:
            raise DomainError(f"a rectangle needs c = d, got c={c}, d={d}")
        if a < 0.5:
            cot = 1.0 / math.tan(math.pi * a)
            if abs((d - c) - cot) > 1e-12 * max(1.0, cot):
                raise DomainError(
                    f"d - c = {d - c} does not match cot(pi*alpha) = {cot}"
                )

    @classmethod
    def from_alpha_c(cls, alpha: float, c: float) -> "TrapezoidSpec":
        """Trapezoid with ``d = c + cot(pi*alpha)``."""
        if not 0 < alpha <= 0.5:
            raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
        if not c > 0:
            raise DomainError(f"c must be positive, got {c}")
        if alpha == 0.5:
            return cls(alpha, c, c)
        return cls(alpha, c, c + 1.0 / math.tan(math.pi * alpha))

    @property
    def is_rectangle(self) -> bool:
        return self.alpha == 0.5


@dataclass(frozen=True)
class BoundsReport:
    lam: float
    k: float
    mod_interior: float
    mod_exterior: float
    ml_natural: float
    ml_shifted: float
    ml_enhanced: float
    qr_lower: float
    qr_upper: float

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam, "k": self.k,
            "mod_interior": self.mod_interior, "mod_exterior": self.mod_exterior,
            "ml_natural": self.ml_natural, "ml_shifted": self.ml_shifted,
            "ml_enhanced": self.ml_enhanced,
            "qr_lower": self.qr_lower, "qr_upper": self.qr_upper,
        }


def _complement(m: float) -> float:
    return math.sqrt((1.0 - m) * (1.0 + m))


def _check_modulus(m: float, mp: Optional[float], name: str) -> float:
    """Validate a modulus and return its complement.

    ``m`` may round to 1 when an accurate positive complement is supplied.
    """
    if mp is None:
        if not 0 < m < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {m}")
        return _complement(m)
    if not (0 < m <= 1 and 0 < mp < 1):
        raise DomainError(f"invalid modulus pair {name}={m}, complement={mp}")
    return mp


def _solve_log_ratio(f: Callable[[float], float], what: str) -> float:
    """Root in ``log p`` of an increasing function, bracket grown geometrically."""
    lo, hi = -1.0, 1.0
    for _ in range(12):
        if f(lo) < 0:
            break
        lo *= 2.0
    for _ in range(12):
        if f(hi) > 0:
            break
        hi *= 2.0
    flo, fhi = f(lo), f(hi)
    if not (flo < 0 < fhi):
        raise BracketError(f"could not bracket {what} (f={flo:.3g}, {fhi:.3g})")
    return math.exp(bisect(f, lo, hi, xtol=_XTOL, maxiter=200))


# ---------------------------------------------------------------------------
# Interior map
# ---------------------------------------------------------------------------


def interior_integrals(alpha: float, lam: float, lamp: Optional[float] = None,
                       spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """Images of the top and bottom half-bases, up to the common constant.

    Returns
    -------
    int1 : float
        ``int_0^1 (1-t^2)^-alpha (1-lam^2 t^2)^(alpha-1) dt``
    int2 : float
        ``int_{1/lam}^inf (t^2-1)^-alpha (lam^2 t^2-1)^(alpha-1) dt``, computed as
        ``lam^(2 alpha - 1) int_0^1 (1-s^2)^(alpha-1) (1-lam^2 s^2)^-alpha ds``.
    """
    spec = spec or DEFAULT_SPEC
    lamp = _check_modulus(lam, lamp, "lambda")
    l2, lp2 = lam * lam, lamp * lamp

    def f1(t, d0, d1):
        # 1 - lam^2 t^2 = lam'^2 + lam^2 (1 - t)(1 + t)
        return (1.0 + t) ** (-alpha) * (lp2 + l2 * d1 * (1.0 + t)) ** (alpha - 1.0)

    def f2(s, d0, d1):
        return (1.0 + s) ** (alpha - 1.0) * (lp2 + l2 * d1 * (1.0 + s)) ** (-alpha)

    i1, _ = quad(f1, 0.0, 1.0, spec, weight=(0.0, -alpha), gaps=True)
    i2, _ = quad(f2, 0.0, 1.0, spec, weight=(0.0, alpha - 1.0), gaps=True)
    return float(i1), float(lam ** (2.0 * alpha - 1.0) * i2)


def interior_ratio_hypergeometric(alpha: float, lam: float) -> float:
    """``int2 / int1`` through Gauss functions; equals ``d/c`` at the solution."""
    z = lam * lam
    num = beta(alpha, 0.5) * lam ** (2 * alpha - 1) * hyp2f1(0.5, alpha, alpha + 0.5, z)
    den = beta(1 - alpha, 0.5) * hyp2f1(0.5, 1 - alpha, 1.5 - alpha, z)
    return num / den


def _interior_p(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec]) -> float:
    if spec.is_rectangle:
        # width 2c, height 1: 2 K(lam)/K(lam') = 2c
        return 1.0 / spec.c
    target = math.log(spec.c / spec.d)

    def f(logp):
        # base ratio int1/int2 decreases with p
        lam, lamp = moduli_from_ratio(math.exp(logp))
        i1, i2 = interior_integrals(spec.alpha, lam, lamp, qspec)
        return target - math.log(i1 / i2)

    return _solve_log_ratio(f, "interior parameter")


def interior_lambda(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """The prevertex parameter ``lam`` of the interior map.

    Raises
    ------
    DomainError
        For a rectangle, where the base ratio carries no shape information;
        use :func:`interior_lambda_rectangle`.
    """
    if spec.is_rectangle:
        raise DomainError("alpha = 1/2: use interior_lambda_rectangle")
    return moduli_from_ratio(_interior_p(spec, qspec))[0]


def interior_lambda_rectangle(c: float) -> float:
    """``lam`` with ``2 K(lam)/K(lam') = 2c`` for the rectangle of width 2c."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    return moduli_from_ratio(1.0 / c)[0]


def interior_modulus(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """``2 K(lam)/K(lam')``, the modulus of the trapezoid with its vertices."""
    return 2.0 / _interior_p(spec, qspec)


# ---------------------------------------------------------------------------
# Exterior map
# ---------------------------------------------------------------------------


def _a2(alpha: float, k: float, kp: float) -> float:
    A = (0.5 - alpha) * kp * kp
    # sqrt(A^2 + k^2) - A without cancellation
    return k * k / (math.hypot(A, k) + A)


def exterior_a_of_k(alpha: float, k: float) -> float:
    """Prevertex ``a`` for which the pole at ``i`` has zero residue."""
    if not 0 < k < 1:
        raise DomainError(f"k must lie in (0, 1), got {k}")
    if not 0 < alpha <= 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    return math.sqrt(_a2(alpha, k, _complement(k)))


def exterior_integrals(alpha: float, k: float, kp: Optional[float] = None,
                       spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """Top and bottom half-base integrals of the exterior map (scaled by 1/a).

    Returns
    -------
    num : float
        ``int_0^1 (1-s^2)^alpha (1-k^2 s^2)^(1-alpha) / (1+a^2 s^2)^2 ds``
    den : float
        ``int_{1/k}^inf (s^2-1)^alpha (k^2 s^2-1)^(1-alpha) / (1+a^2 s^2)^2 ds``
    """
    spec = spec or DEFAULT_SPEC
    kp = _check_modulus(k, kp, "k")
    k2, kp2 = k * k, kp * kp
    a2 = _a2(alpha, k, kp)

    def fn(s, d0, d1):
        return ((1.0 + s) ** alpha * (kp2 + k2 * d1 * (1.0 + s)) ** (1.0 - alpha)
                / (1.0 + a2 * s * s) ** 2)

    def fd(s, d0, d1):
        return ((1.0 + s) ** (1.0 - alpha) * (kp2 + k2 * d1 * (1.0 + s)) ** alpha
                / (a2 + k2 * s * s) ** 2)

    n, _ = quad(fn, 0.0, 1.0, spec, weight=(0.0, alpha), gaps=True)
    m, _ = quad(fd, 0.0, 1.0, spec, weight=(0.0, 1.0 - alpha), gaps=True)
    return float(n), float(k ** (3.0 - 2.0 * alpha) * m)


def exterior_ratio_appell(alpha: float, k: float) -> float:
    """``den / num`` through Appell functions; equals ``d/c`` at the solution."""
    a2 = exterior_a_of_k(alpha, k) ** 2
    num = 0.5 * beta(0.5, 1 + alpha) * appell_f1(0.5, alpha - 1, 2.0, 1.5 + alpha, k * k, -a2)
    den = (k ** (3 - 2 * alpha) / (2 * a2 * a2) * beta(0.5, 2 - alpha)
           * appell_f1(0.5, -alpha, 2.0, 2.5 - alpha, k * k, -k * k / a2))
    return float(den / num)


def _exterior_p(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec]) -> float:
    if spec.is_rectangle:
        # rectangle: closed-form height relation, DP(h) = p/2
        from .oracle import dp_modulus_of_height
        return 2.0 * dp_modulus_of_height(2.0 * spec.d)
    target = math.log(spec.c / spec.d)

    def f(logp):
        k, kp = moduli_from_ratio(math.exp(logp))
        n, m = exterior_integrals(spec.alpha, k, kp, qspec)
        return target - math.log(n / m)

    return _solve_log_ratio(f, "exterior parameter")


def exterior_k(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """The prevertex ratio ``k = a/b`` of the exterior map.

    Raises
    ------
    DomainError
        For a rectangle; use :func:`exterior_k_rectangle`.
    """
    if spec.is_rectangle:
        raise DomainError("alpha = 1/2: use exterior_k_rectangle")
    return moduli_from_ratio(_exterior_p(spec, qspec))[0]


def exterior_k_rectangle(d: float) -> float:
    """``k`` for the exterior of the rectangle of width ``2d`` and height 1."""
    from .oracle import dp_k_of_height
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    return dp_k_of_height(2.0 * d)


def exterior_modulus(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """``2 K(k)/K(k')`` for the exterior with the same vertices."""
    return 2.0 / _exterior_p(spec, qspec)


def _parameters(spec: TrapezoidSpec, qspec=None):
    """``(lam, lam', k, k', p_int, p_ext)`` for any trapezoid, rectangles included."""
    p_int = _interior_p(spec, qspec)
    p_ext = _exterior_p(spec, qspec)
    lam, lamp = moduli_from_ratio(p_int)
    k, kp = moduli_from_ratio(p_ext)
    return lam, lamp, k, kp, p_int, p_ext


def ml_natural(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """``max(x, 1/x)`` for ``x = K(lam) K(k') / (K(lam') K(k))``."""
    p_int = _interior_p(spec, qspec)
    p_ext = _exterior_p(spec, qspec)
    # x = (2/p_int) / (2/p_ext)
    x = p_ext / p_int
    return max(x, 1.0 / x)


# ---------------------------------------------------------------------------
# Rectangle estimate and shifted vertices
# ---------------------------------------------------------------------------


def g_function(lam: float) -> float:
    """``lam K(lam') / K(lam)``."""
    if not 0 < lam < 1:
        raise DomainError(f"g requires 0 < lambda < 1, got {lam}")
    return lam * ellip_Kp(lam) / ellip_K(lam)


_LAMBDA0: Optional[float] = None


def lambda0() -> float:
    """Maximiser of ``g``: root of ``lam'^2 K(lam) K(lam') = pi/2``."""
    global _LAMBDA0
    if _LAMBDA0 is None:
        def f(lam):
            return (1.0 - lam * lam) * ellip_K(lam) * ellip_Kp(lam) - 0.5 * math.pi
        _LAMBDA0 = bisect(f, 0.5, 0.95, xtol=1e-15, maxiter=200)
    return _LAMBDA0


def rectangle_lower_bound(d: float, delta: float) -> float:
    """``2 g(delta/d) d``, a lower bound for the modulus ratio of a rectangle."""
    if not 0 < delta <= d:
        raise DomainError(f"need 0 < delta <= d, got delta={delta}, d={d}")
    if delta == d:
        return 0.0
    return 2.0 * g_function(delta / d) * d


def C_alpha(alpha: float) -> float:
    """Reciprocal distortion of the shear that flattens the slanted sides."""
    if not 0 < alpha <= 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    if alpha == 0.5:
        return 0.0
    h = 0.5 * math.tan(math.pi * alpha)
    # (sqrt(1 + h^2) - h)^2 written without cancellation
    return 1.0 / (math.sqrt(1.0 + h * h) + h) ** 2


def ml_shifted(spec: TrapezoidSpec) -> float:
    """``g(m)(1 + C(alpha)) d`` with ``m = min(lambda0, c/d)``."""
    ratio = spec.c / spec.d
    lam0 = lambda0()
    g = g_function(lam0) if ratio >= lam0 else g_function(ratio)
    return g * (1.0 + C_alpha(spec.alpha)) * spec.d


def qr_lower(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """Best available lower bound for the reflection coefficient.

    The maximum of :func:`ml_shifted` and :func:`ml_natural`; for a
    rectangle the bound ``2 g(lambda0) d`` is included as well.
    """
    out = max(ml_shifted(spec), ml_natural(spec, qspec))
    if spec.is_rectangle:
        out = max(out, 2.0 * g_function(lambda0()) * spec.d)
    return out


# ---------------------------------------------------------------------------
# Boundary correspondence and the enhanced bound
# ---------------------------------------------------------------------------


def boundary_interior(x: float, alpha: float, lam: float,
                      qspec: Optional[QuadratureSpec] = None) -> float:
    """Arc length along the bases from the image of 0 or of infinity.

    For ``0 <= x <= 1`` returns ``int_0^x phi``, for ``x > 1/lam`` returns
    ``int_x^inf phi``, where ``phi`` is the interior integrand.
    """
    if 0 <= x < 1:
        if x == 0:
            return 0.0
        return x * appell_f1(0.5, alpha, 1 - alpha, 1.5, x * x, (lam * x) ** 2, qspec)
    if x == 1:
        return 0.5 * beta(1 - alpha, 0.5) * hyp2f1(0.5, 1 - alpha, 1.5 - alpha, lam * lam)
    if x > 1.0 / lam:
        u = 1.0 / x
        return lam ** (2 * (alpha - 1)) * u * appell_f1(
            0.5, alpha, 1 - alpha, 1.5, u * u, (u / lam) ** 2, qspec)
    raise DomainError(f"x = {x} lies in the gap (1, 1/lambda]")


def boundary_exterior(x: float, alpha: float, k: float,
                      qspec: Optional[QuadratureSpec] = None) -> float:
    """Exterior analogue of :func:`boundary_interior` with ``a = a(k)``."""
    a2 = exterior_a_of_k(alpha, k) ** 2
    b = (-alpha, alpha - 1.0, 2.0)
    if 0 <= x < 1:
        if x == 0:
            return 0.0
        z = x * x
        return x * lauricella_fd(0.5, b, 1.5, (z, k * k * z, -a2 * z), qspec)
    if x == 1:
        return 0.5 * beta(0.5, 1 + alpha) * appell_f1(
            0.5, alpha - 1, 2.0, 1.5 + alpha, k * k, -a2, qspec)
    if x > 1.0 / k:
        u2 = 1.0 / (x * x)
        return k ** (2 * (1 - alpha)) / (x * a2 * a2) * lauricella_fd(
            0.5, b, 1.5, (u2, u2 / (k * k), -u2 / a2), qspec)
    raise DomainError(f"x = {x} lies in the gap (1, 1/k]")


def _gap_integral(f: Callable, power: float, gap: float, scale: float,
                  spec: QuadratureSpec) -> float:
    """``int_0^gap r^power f(r) dr`` where ``f`` varies on the scale ``scale``.

    Beyond ``scale`` the substitution ``r = e^v`` keeps the integrand smooth
    when the gap spans many orders of magnitude.
    """
    if gap <= scale:
        return float(quad(f, 0.0, gap, spec, weight=(power, 0.0))[0])
    near = float(quad(f, 0.0, scale, spec, weight=(power, 0.0))[0])

    def g(v):
        r = np.exp(v)
        return r ** (power + 1.0) * f(r)

    far = float(quad(g, math.log(scale), math.log(gap), spec)[0])
    return near + far


def _solve_log_gap(G: Callable[[float], float], target: float, hi: float,
                   what: str) -> float:
    """``gap`` with ``G(gap) = target`` for increasing G, by root finding in log."""
    lo = -500.0
    for _ in range(40):
        if G(math.exp(hi)) > target:
            break
        hi += 10.0
    f = lambda v: G(math.exp(v)) - target  # noqa: E731
    if not f(lo) < 0 < f(hi):
        raise BracketError(f"could not bracket the {what} gap")
    return math.exp(brentq(f, lo, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps,
                           maxiter=200))


def _vertex_gaps(pw_head: float, pw_tail: float, m: float, mp: float, extra,
                 top: float, bottom: float, share: float, spec: QuadratureSpec):
    """Distances ``1 - x*`` and ``x** - 1/m`` of the shifted preimages.

    The integrand on the bases is ``(1-t^2)^pw_head (1-m^2 t^2)^pw_tail``
    times ``extra(t^2)`` (and the same with both factors sign-flipped beyond
    ``1/m``). Both gaps are solved from integrals anchored at the vertices,
    so they keep full relative accuracy when ``m`` is within rounding of 1.
    """
    m2, mp2 = m * m, mp * mp
    gm = mp2 / (m * (1.0 + m))  # 1/m - 1

    def head(r):
        # t = 1 - r: 1 - t^2 = r(2 - r), 1 - m^2 t^2 = m'^2 + m^2 r(2 - r)
        t = 1.0 - r
        return ((2.0 - r) ** pw_head * (mp2 + m2 * r * (2.0 - r)) ** pw_tail
                * extra(t * t))

    def tail(r):
        # t = 1/m + r: t^2 - 1 = (gm + r)(2 + gm + r), m^2 t^2 - 1 = m r (2 + m r)
        t = 1.0 / m + r
        return ((gm + r) * (2.0 + gm + r)) ** pw_head * (
            m ** pw_tail * (2.0 + m * r) ** pw_tail) * extra(t * t)

    scale_head = min(1.0, mp2)
    scale_tail = max(gm, 1e-300)
    if share >= 1.0:
        eps = 0.0
    else:
        eps = _solve_log_gap(
            lambda e: _gap_integral(head, pw_head, e, scale_head, spec),
            (1.0 - share) * top, 0.0, "head")
        eps = min(eps, 1.0)
    eta = _solve_log_gap(
        lambda e: _gap_integral(tail, pw_tail, e, scale_tail, spec),
        bottom - share * top, 0.0, "tail")
    return eps, eta, gm


def _shifted_ratio(eps: float, eta: float, gm: float) -> Tuple[float, float]:
    """``x*/x**`` and its complement from ``x* = 1 - eps``, ``x** = 1 + gm + eta``."""
    x2 = 1.0 + gm + eta
    r = (1.0 - eps) / x2
    one_minus = (gm + eta + eps) / x2
    return r, math.sqrt(one_minus * (1.0 + r))


def ml_enhanced(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> float:
    """Modulus ratio for the shifted quadruple ``+-delta, +-delta - i``.

    ``delta = min(lambda0 d, c)``. The preimages of ``delta`` and
    ``delta - i`` under the interior and exterior maps give
    ``lam~ = x*/x**`` and ``k~ = y*/y**``; the result is
    ``K(lam~) K(k~') / (K(lam~') K(k~))``.
    """
    qspec = qspec or DEFAULT_SPEC
    lam, lamp, k, kp, _, _ = _parameters(spec, qspec)
    delta = min(lambda0() * spec.d, spec.c)
    share = delta / spec.c
    alpha = spec.alpha
    ratio = spec.d / spec.c

    top_i = interior_integrals(alpha, lam, lamp, qspec)[0]
    gaps_i = _vertex_gaps(-alpha, alpha - 1.0, lam, lamp, lambda t2: 1.0,
                          top_i, top_i * ratio, share, qspec)

    a2 = _a2(alpha, k, kp)
    top_e = exterior_integrals(alpha, k, kp, qspec)[0]
    gaps_e = _vertex_gaps(alpha, 1.0 - alpha, k, kp,
                          lambda t2: 1.0 / (1.0 + a2 * t2) ** 2,
                          top_e, top_e * ratio, share, qspec)

    lt, ltp = _shifted_ratio(*gaps_i)
    kt, ktp = _shifted_ratio(*gaps_e)
    K_l, Kp_l = ellip_KE(lt, ltp)[0], ellip_KE(ltp, lt)[0]
    K_k, Kp_k = ellip_KE(kt, ktp)[0], ellip_KE(ktp, kt)[0]
    return (K_l * Kp_k) / (Kp_l * K_k)


def bounds(spec: TrapezoidSpec, qspec: Optional[QuadratureSpec] = None) -> BoundsReport:
    """Every lower bound together with the starlike upper bound."""
    from .starlike import qr_upper

    lam, lamp, k, kp, p_int, p_ext = _parameters(spec, qspec)
    x = p_ext / p_int
    natural = max(x, 1.0 / x)
    shifted = ml_shifted(spec)
    lower = max(shifted, natural)
    if spec.is_rectangle:
        lower = max(lower, 2.0 * g_function(lambda0()) * spec.d)
    return BoundsReport(
        lam=lam, k=k, mod_interior=2.0 / p_int, mod_exterior=2.0 / p_ext,
        ml_natural=natural, ml_shifted=shifted,
        ml_enhanced=ml_enhanced(spec, qspec), qr_lower=lower,
        qr_upper=qr_upper(spec.c, spec.d).qr_upper,
    )
