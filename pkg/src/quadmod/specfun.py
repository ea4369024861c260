"""Special functions used by the modulus solvers.

Complete elliptic integrals (AGM), the Grötzsch ring function ``mu``, the
Gauss, Appell and Lauricella hypergeometric functions, the Euler beta
function and a double-exponential quadrature engine.

Elliptic integrals follow the *modulus* convention: ``ellip_K(k)`` is
``K(k) = int_0^1 dt / sqrt((1 - t^2)(1 - k^2 t^2))``, not the parameter
``m = k^2`` convention used by scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, SingularArgumentError

__all__ = [
    "QuadratureSpec",
    "LauricellaArgs",
    "quad",
    "beta",
    "agm",
    "ellip_K",
    "ellip_E",
    "ellip_Kp",
    "ellip_Ep",
    "ellip_KE",
    "mu",
    "mu_prime",
    "mu_second",
    "mu_inverse",
    "moduli_from_ratio",
    "hyp2f1",
    "appell_f1",
    "lauricella_fd",
]

HALF_PI = 0.5 * math.pi


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`quad`.

    The integral is accepted once the level-to-level change drops below
    ``max(abs_tol, rel_tol * |value|)``. Each level halves the step size of
    the underlying trapezoidal rule, so ``max_levels`` caps the work at
    roughly ``12 * 2**max_levels`` integrand evaluations.
    """

    abs_tol: float = 1e-15
    rel_tol: float = 1e-13
    max_levels: int = 10

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_levels < 1:
            raise DomainError(f"max_levels must be >= 1, got {self.max_levels}")

    @classmethod
    def from_digits(cls, wp: int, max_levels: int = 10) -> "QuadratureSpec":
        """Relative tolerance ``10**-wp`` with a matching absolute floor."""
        tol = 10.0 ** (-wp)
        return cls(abs_tol=tol * 1e-3, rel_tol=tol, max_levels=max_levels)


DEFAULT_SPEC = QuadratureSpec()

# Nodes beyond |u| = 6 sit closer than ~1e-275 to the endpoints.
_U_MAX = 6.0
_MIN_LEVEL = 3


@lru_cache(maxsize=None)
def _ts_nodes(level: int):
    """Nodes added at ``level`` on [-1, 1] as (left gap, right gap, weight).

    Gaps to both endpoints are returned explicitly so integrands can be
    evaluated without cancellation next to an endpoint singularity.
    """
    h = 2.0 ** (-level)
    if level == 0:
        u = np.arange(0.0, _U_MAX + 0.5 * h, h)
    else:
        u = np.arange(h, _U_MAX + 0.5 * h, 2 * h)
    v = HALF_PI * np.sinh(u)
    e = np.exp(-2.0 * v)
    near = 2.0 * e / (1.0 + e)  # gap to the nearer endpoint
    far = 2.0 / (1.0 + e)
    w = HALF_PI * np.cosh(u) * 4.0 * e / (1.0 + e) ** 2
    pos = u > 0
    # right half (u >= 0) then mirrored left half (u > 0)
    gl = np.concatenate([far, near[pos]])
    gr = np.concatenate([near, far[pos]])
    ww = np.concatenate([w, w[pos]])
    for arr in (gl, gr, ww):
        arr.setflags(write=False)
    return gl, gr, ww


def _tanh_sinh(F, a: float, b: float, spec: QuadratureSpec):
    """Integrate ``F(x, x - a, b - x)`` over [a, b] (a < b)."""
    half = 0.5 * (b - a)
    total = None
    err = math.inf
    for level in range(spec.max_levels + 1):
        gl, gr, w = _ts_nodes(level)
        da = half * gl
        db = half * gr
        x = np.where(gl <= gr, a + da, b - db)
        vals = np.broadcast_to(np.asarray(F(x, da, db)), x.shape)
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError(
                f"integrand not finite on [{a}, {b}] at level {level}"
            )
        h = 2.0 ** (-level)
        part = half * h * np.sum(w * vals)
        if total is None:
            total = part
            continue
        new = 0.5 * total + part
        err = abs(new - total)
        total = new
        if level >= _MIN_LEVEL and err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total, err
    raise ConvergenceError(
        f"tanh-sinh did not converge on [{a}, {b}] after {spec.max_levels} "
        f"levels (value {total}, error estimate {err:.3g})"
    )


def _one_minus_pow(u, cu, q):
    """1 - u**q with u = 1 - cu, accurate for u near 1."""
    with np.errstate(divide="ignore"):
        lu = np.where(u < 0.5, np.log(np.maximum(u, 1e-300)), np.log1p(-cu))
    return -np.expm1(q * lu)


def quad(
    f: Callable,
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
    *,
    weight: Optional[Tuple[float, float]] = None,
    gaps: bool = False,
) -> Tuple[float, float]:
    """Tanh-sinh quadrature of ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand. Called as ``f(x)``, or as ``f(x, x - a, b - x)``
        when ``gaps`` is true; the gaps are exact even where ``x`` rounds to
        an endpoint.
    a, b : float
        Finite limits.
    spec : QuadratureSpec, optional
    weight : (pa, pb), optional
        Integrate ``f(x) * (x - a)**pa * (b - x)**pb`` instead; the weight
        is absorbed by a power substitution on each half interval, so
        exponents arbitrarily close to -1 cost nothing extra.

    Returns
    -------
    value, error : the integral and its estimated absolute error.
    """
    spec = spec or DEFAULT_SPEC
    if a == b:
        return 0.0, 0.0
    if b < a:
        if weight is not None:
            weight = (weight[1], weight[0])
        v, e = quad(f, b, a, spec, weight=weight, gaps=gaps)
        return -v, e

    if gaps:
        call = f
    else:
        def call(x, da, db):
            return f(x)

    if weight is None:
        return _tanh_sinh(call, a, b, spec)

    pa, pb = float(weight[0]), float(weight[1])
    if pa <= -1 or pb <= -1:
        raise DomainError(f"weight exponents must exceed -1, got {weight}")
    m = 0.5 * (a + b)
    left_len, right_len = m - a, b - m
    qa, qb = 1.0 / (1.0 + pa), 1.0 / (1.0 + pb)

    def left(u, cu0, cu1):
        da = left_len * u ** qa
        db = right_len + left_len * _one_minus_pow(u, cu1, qa)
        return db ** pb * call(a + da, da, db)

    def right(u, cu0, cu1):
        db = right_len * u ** qb
        da = left_len + right_len * _one_minus_pow(u, cu1, qb)
        return da ** pa * call(b - db, da, db)

    vl, el = _tanh_sinh(left, 0.0, 1.0, spec)
    vr, er = _tanh_sinh(right, 0.0, 1.0, spec)
    cl = qa * left_len ** (1.0 + pa)
    cr = qb * right_len ** (1.0 + pb)
    return cl * vl + cr * vr, cl * el + cr * er


# ---------------------------------------------------------------------------
# Beta, AGM and elliptic integrals
# ---------------------------------------------------------------------------


def beta(a: float, b: float) -> float:
    """Euler beta function for positive arguments."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta requires positive arguments, got ({a}, {b})")
    if a + b < 170:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    if a < 0 or b < 0:
        raise DomainError("agm requires non-negative arguments")
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellip_KE(k: float, kp: Optional[float] = None) -> Tuple[float, float]:
    """``(K(k), E(k))`` from one AGM sweep.

    ``kp`` is the complementary modulus; pass it when ``1 - k`` is not
    representable accurately (k close to 1).
    """
    if kp is None:
        kp = math.sqrt((1.0 - k) * (1.0 + k))
    if kp == 0:
        raise DomainError("K(k) diverges at k = 1")
    a, b = 1.0, kp
    power = 0.5
    s = power * k * k
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        s += power * c * c
        # stops before power * ulp**2 can accumulate
        if abs(c) <= 1e-15 * a:
            break
    K = HALF_PI / a
    return K, K * (1.0 - s)


def ellip_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention."""
    if not 0 <= k < 1.0 - 1e-16:
        raise DomainError(f"ellip_K requires 0 <= k < 1, got {k}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return HALF_PI / agm(1.0, kp)


def ellip_E(k: float) -> float:
    """Complete elliptic integral of the second kind, modulus convention."""
    if not 0 <= k <= 1:
        raise DomainError(f"ellip_E requires 0 <= k <= 1, got {k}")
    if k == 1:
        return 1.0
    return ellip_KE(k)[1]


def ellip_Kp(k: float) -> float:
    """``K(sqrt(1 - k^2))`` evaluated without forming the complement."""
    if not 0 < k <= 1:
        raise DomainError(f"ellip_Kp requires 0 < k <= 1, got {k}")
    return HALF_PI / agm(1.0, k)


def ellip_Ep(k: float) -> float:
    """``E(sqrt(1 - k^2))`` evaluated without forming the complement."""
    if not 0 <= k <= 1:
        raise DomainError(f"ellip_Ep requires 0 <= k <= 1, got {k}")
    if k == 0:
        return 1.0
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return ellip_KE(kp, k)[1]


def mu(r: float) -> float:
    """Grötzsch ring function ``(pi/2) K(r') / K(r)`` on (0, 1)."""
    if not 0 < r < 1:
        raise DomainError(f"mu requires 0 < r < 1, got {r}")
    rp = math.sqrt((1.0 - r) * (1.0 + r))
    return HALF_PI * agm(1.0, rp) / agm(1.0, r)


def mu_prime(r: float) -> float:
    if not 0 < r < 1:
        raise DomainError(f"mu_prime requires 0 < r < 1, got {r}")
    K = ellip_K(r)
    return -math.pi ** 2 / (4.0 * r * (1.0 - r * r) * K * K)


def mu_second(r: float) -> float:
    if not 0 < r < 1:
        raise DomainError(f"mu_second requires 0 < r < 1, got {r}")
    K, E = ellip_KE(r)
    s = 1.0 - r * r
    return math.pi ** 2 * (2.0 * E - (1.0 + r * r) * K) / (4.0 * r * r * s * s * K ** 3)


def _theta_234(q: float) -> Tuple[float, float, float]:
    """Jacobi theta null values for a nome 0 < q <= exp(-pi)."""
    t2 = 0.0
    n = 0
    while True:
        term = q ** (n * (n + 1))
        t2 += term
        if term < 1e-18:
            break
        n += 1
    t2 *= 2.0 * q ** 0.25
    t3 = t4 = 1.0
    n = 1
    while True:
        term = q ** (n * n)
        t3 += 2.0 * term
        t4 += 2.0 * term * (-1) ** n
        if term < 1e-18:
            break
        n += 1
    return t2, t3, t4


def moduli_from_ratio(p: float) -> Tuple[float, float]:
    """Modulus ``k`` and complement ``k'`` with ``K(k') / K(k) = p``.

    Uses the theta-null representation ``k = theta2^2/theta3^2``,
    ``k' = theta4^2/theta3^2`` with nome ``exp(-pi p)``, so both moduli come
    out to full relative precision even when one of them is tiny.
    """
    if not p > 0:
        raise DomainError(f"ratio must be positive, got {p}")
    if p < 1:
        kp, k = moduli_from_ratio(1.0 / p)
        return k, kp
    t2, t3, t4 = _theta_234(math.exp(-math.pi * p))
    return (t2 / t3) ** 2, (t4 / t3) ** 2


def mu_inverse(y: float) -> float:
    """Inverse of :func:`mu`: the ``r`` in (0, 1) with ``mu(r) = y``."""
    return moduli_from_ratio(2.0 * y / math.pi)[0]


# ---------------------------------------------------------------------------
# Hypergeometric functions
# ---------------------------------------------------------------------------


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _hyp2f1_series(a, b, c, z, max_terms=1_000_000):
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
    raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms")


def _check_arguments(zs):
    out = []
    for z in zs:
        z = complex(z)
        if z == 1:
            raise SingularArgumentError("hypergeometric argument equals 1")
        if z.imag == 0 and z.real > 1:
            raise DomainError(
                f"argument {z.real} > 1 lies on the branch cut"
            )
        out.append(z)
    return out


def _euler_integral(a, c, bs, zs, spec):
    """(1/B(a, c-a)) int_0^1 u^(a-1) (1-u)^(c-a-1) prod (1 - u z_k)^(-b_k) du."""
    if not c > a > 0:
        raise DomainError(
            f"integral representation needs c > a > 0, got a={a}, c={c}"
        )
    zs = _check_arguments(zs)
    is_real = all(z.imag == 0 for z in zs)
    if is_real:
        zs = [z.real for z in zs]
    pairs = [(b, z) for b, z in zip(bs, zs) if b != 0 and z != 0]

    def g(u, du0, du1):
        out = 1.0
        for b, z in pairs:
            lin = np.where(u < 0.5, 1.0 - u * z, (1.0 - z) + z * du1)
            out = out * lin ** (-b)
        return out

    val, _ = quad(g, 0.0, 1.0, spec, weight=(a - 1.0, c - a - 1.0), gaps=True)
    val /= beta(a, c - a)
    return float(val.real) if is_real else complex(val)


def hyp2f1(a: float, b: float, c: float, z: float, method: str = "auto",
           spec: Optional[QuadratureSpec] = None) -> float:
    """Gauss hypergeometric function for real ``z < 1``.

    ``method='series'`` sums the power series (|z| < 1), ``'integral'``
    uses the Euler integral, ``'auto'`` picks the series for |z| < 0.9,
    a Pfaff transformation for large negative ``z`` and the integral
    otherwise.
    """
    if _is_nonpositive_int(c):
        raise DomainError(f"2F1 undefined for c = {c}")
    if z == 1:
        raise SingularArgumentError("2F1 singular at z = 1")
    if z > 1:
        raise DomainError(f"2F1 requires z < 1, got {z}")
    if z == 0:
        return 1.0
    if method == "series":
        if abs(z) >= 1:
            raise DomainError(f"series requires |z| < 1, got {z}")
        return _hyp2f1_series(a, b, c, z)
    if method == "integral":
        if c > a > 0:
            return _euler_integral(a, c, [b], [z], spec)
        return _euler_integral(b, c, [a], [z], spec)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")

    if abs(z) < 0.9:
        return _hyp2f1_series(a, b, c, z)
    if z < 0:
        w = z / (z - 1.0)
        if w < 0.9:
            return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, w)
    if c > a > 0 or c > b > 0:
        return hyp2f1(a, b, c, z, method="integral", spec=spec)
    raise DomainError(
        f"2F1({a}, {b}; {c}; {z}) is outside the supported parameter range"
    )


@dataclass(frozen=True)
class LauricellaArgs:
    """Parameters of ``F_D^(n)(a; b_1..b_n; c; z_1..z_n)``."""

    a: float
    b: Tuple[float, ...]
    c: float
    z: Tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "z", tuple(complex(x) for x in self.z))
        if len(self.b) != len(self.z):
            raise DomainError(
                f"{len(self.b)} b-parameters but {len(self.z)} arguments"
            )
        if not self.c > self.a > 0:
            raise DomainError(
                f"integral representation needs c > a > 0, got a={self.a}, c={self.c}"
            )
        _check_arguments(self.z)


def lauricella_fd(a: float, b: Sequence[float], c: float, z: Sequence[complex],
                  spec: Optional[QuadratureSpec] = None):
    """Lauricella ``F_D^(n)`` through its one-dimensional Euler integral.

    Returns a float when every argument is real, a complex otherwise. The
    principal branch of each ``(1 - u z_k)^(-b_k)`` is used; it is
    continuous on u in [0, 1] unless ``z_k`` is real and exceeds 1, which
    is rejected.
    """
    args = LauricellaArgs(a, tuple(b), c, tuple(z))
    return _euler_integral(args.a, args.c, args.b, args.z, spec)


def appell_f1(a: float, b1: float, b2: float, c: float, z, w,
              spec: Optional[QuadratureSpec] = None):
    """Appell ``F1(a; b1, b2; c; z, w)`` via Picard's integral."""
    return lauricella_fd(a, (b1, b2), c, (z, w), spec)
