import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import brentq

from quadmod.errors import DomainError
from quadmod.specfun import ellip_K, ellip_Kp, mu_inverse
from quadmod.starlike import qr_upper
from quadmod.trapezoid import (
    BoundsReport,
    C_alpha,
    TrapezoidSpec,
    boundary_exterior,
    boundary_interior,
    bounds,
    exterior_a_of_k,
    exterior_integrals,
    exterior_k,
    exterior_k_rectangle,
    exterior_modulus,
    exterior_ratio_appell,
    g_function,
    interior_integrals,
    interior_lambda,
    interior_lambda_rectangle,
    interior_modulus,
    interior_ratio_hypergeometric,
    lambda0,
    ml_enhanced,
    ml_natural,
    ml_shifted,
    qr_lower,
    rectangle_lower_bound,
)

from . import oracles

QUARTER = TrapezoidSpec(0.25, 1.0, 2.0)
LAMBDA0 = 0.7373921
G0 = 0.708434


@pytest.fixture(scope="module")
def quarter_report() -> BoundsReport:
    return bounds(QUARTER)


class TestSpec:
    def test_cot_relation(self):
        with pytest.raises(DomainError):
            TrapezoidSpec(0.25, 1.0, 2.5)

    def test_ranges(self):
        for args in [(0.0, 1.0, 2.0), (0.6, 1.0, 2.0), (0.25, -1.0, 0.0), (0.25, 2.0, 1.0)]:
            with pytest.raises(DomainError):
                TrapezoidSpec(*args)

    def test_rectangle(self):
        assert TrapezoidSpec(0.5, 1.0, 1.0).is_rectangle
        with pytest.raises(DomainError):
            TrapezoidSpec(0.5, 1.0, 1.5)

    def test_from_alpha_c(self):
        spec = TrapezoidSpec.from_alpha_c(0.25, 3.0)
        assert spec.d == pytest.approx(4.0)
        assert TrapezoidSpec.from_alpha_c(0.5, 2.0).d == 2.0
        with pytest.raises(DomainError):
            TrapezoidSpec.from_alpha_c(0.25, 0.0)


class TestInterior:
    def test_rectangle_is_degenerate(self):
        with pytest.raises(DomainError):
            interior_lambda(TrapezoidSpec(0.5, 1.0, 1.0))

    def test_against_mpmath_root(self):
        lam = interior_lambda(QUARTER)
        ref = mpmath.findroot(lambda l: oracles.trapezoid_interior_ratio(0.25, l) - 2.0,
                              (0.8, 0.9), solver="secant", tol=1e-28)
        assert lam == pytest.approx(float(ref), abs=1e-12)

    def test_hypergeometric_form(self):
        lam = interior_lambda(QUARTER)
        assert interior_ratio_hypergeometric(0.25, lam) == pytest.approx(2.0, abs=1e-9)

    def test_integrals_against_mpmath(self):
        i1, i2 = interior_integrals(0.3, 0.6)
        assert i2 / i1 == pytest.approx(float(oracles.trapezoid_interior_ratio(0.3, 0.6)), rel=1e-12)

    def test_ratio_is_monotone(self):
        ratios = [interior_integrals(0.25, lam)[1] / interior_integrals(0.25, lam)[0]
                  for lam in np.linspace(0.05, 0.95, 19)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_modulus_between_base_widths(self):
        spec = TrapezoidSpec(0.25, 5.0, 6.0)
        assert 10.0 <= interior_modulus(spec) <= 12.0

    def test_rectangle_modulus(self):
        assert interior_modulus(TrapezoidSpec(0.5, 1.0, 1.0)) == pytest.approx(2.0, rel=1e-15)

    def test_modulus_against_elliptic(self):
        lam = interior_lambda(QUARTER)
        ref = 2 * oracles.K(lam) / oracles.K(math.sqrt(1 - lam * lam))
        assert interior_modulus(QUARTER) == pytest.approx(ref, rel=1e-11)

    def test_long_trapezoid(self):
        spec = TrapezoidSpec.from_alpha_c(0.25, 20.0)
        mod = interior_modulus(spec)
        assert 40.0 <= mod <= 42.0

    def test_modulus_pair_validation(self):
        with pytest.raises(DomainError):
            interior_integrals(0.25, 1.0)
        with pytest.raises(DomainError):
            interior_integrals(0.25, 1.0, 0.0)
        # lam that rounds to 1 is accepted with an explicit complement
        i1, i2 = interior_integrals(0.25, 1.0, 1e-20)
        assert i1 > 0 and i2 > 0


class TestInteriorRectangle:
    def test_square(self):
        assert interior_lambda_rectangle(1.0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        # K'/K = 2 is attained at (sqrt 2 - 1)^2
        assert interior_lambda_rectangle(0.5) == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-14)

    def test_mu_inverse(self):
        # mu(lam) = pi K'/(2K) = pi/(2c)
        ref = oracles.solve_increasing(lambda r: math.pi / 4 - oracles.mu(r), 0.01, 0.99)
        assert interior_lambda_rectangle(2.0) == pytest.approx(ref, abs=1e-13)
        assert interior_lambda_rectangle(2.0) == pytest.approx(mu_inverse(math.pi / 4), abs=1e-15)

    @pytest.mark.parametrize("c", [0.3, 1.0, 3.0])
    def test_round_trip(self, c):
        lam = interior_lambda_rectangle(c)
        assert 2 * ellip_K(lam) / ellip_Kp(lam) == pytest.approx(2 * c, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            interior_lambda_rectangle(0.0)


class TestExterior:
    def test_a_for_rectangle(self):
        assert exterior_a_of_k(0.5, 0.3) ** 2 == pytest.approx(0.3, rel=1e-15)

    def test_residue_identity(self):
        alpha, k = 0.25, 0.5
        a = exterior_a_of_k(alpha, k)
        b = a / k
        assert abs(alpha / (1 + a * a) + (1 - alpha) / (1 + b * b) - 0.5) <= 1e-14

    def test_k_near_one(self):
        assert exterior_a_of_k(0.2, 1 - 1e-12) == pytest.approx(1.0, abs=1e-10)

    def test_a_domain(self):
        with pytest.raises(DomainError):
            exterior_a_of_k(0.25, 1.0)
        with pytest.raises(DomainError):
            exterior_a_of_k(0.75, 0.5)

    def test_rectangle_is_degenerate(self):
        with pytest.raises(DomainError):
            exterior_k(TrapezoidSpec(0.5, 1.0, 1.0))

    def test_against_mpmath_root(self):
        k = exterior_k(QUARTER)
        ref = mpmath.findroot(lambda x: oracles.trapezoid_exterior_ratio(0.25, x) - 2.0,
                              (0.2, 0.3), solver="secant", tol=1e-28)
        assert k == pytest.approx(float(ref), abs=1e-12)

    def test_appell_form(self):
        k = exterior_k(QUARTER)
        assert exterior_ratio_appell(0.25, k) == pytest.approx(2.0, abs=1e-8)

    def test_integrals_against_mpmath(self):
        n, m = exterior_integrals(0.3, 0.45)
        assert m / n == pytest.approx(float(oracles.trapezoid_exterior_ratio(0.3, 0.45)), rel=1e-12)

    def test_modulus(self):
        k = exterior_k(QUARTER)
        ref = 2 * oracles.K(k) / oracles.K(math.sqrt(1 - k * k))
        assert exterior_modulus(QUARTER) == pytest.approx(ref, rel=1e-11)

    def test_rectangle_route(self):
        from quadmod.oracle import dp_k_of_height
        assert exterior_k_rectangle(1.0) == dp_k_of_height(2.0)
        with pytest.raises(DomainError):
            exterior_k_rectangle(0.0)


class TestNaturalBound:
    def test_at_least_one(self):
        for spec in (QUARTER, TrapezoidSpec(0.5, 0.3, 0.3), TrapezoidSpec.from_alpha_c(0.1, 1.0)):
            assert ml_natural(spec) >= 1.0

    def test_modulus_ratio_identity(self):
        ratio = interior_modulus(QUARTER) / exterior_modulus(QUARTER)
        assert abs(ml_natural(QUARTER) - max(ratio, 1 / ratio)) <= 1e-12

    def test_elliptic_form(self, quarter_report):
        lam, k = quarter_report.lam, quarter_report.k
        lp, kp = math.sqrt(1 - lam * lam), math.sqrt(1 - k * k)
        x = oracles.K(lam) * oracles.K(kp) / (oracles.K(lp) * oracles.K(k))
        assert quarter_report.ml_natural == pytest.approx(max(x, 1 / x), rel=1e-10)


class TestRectangleBound:
    def test_constants(self):
        assert abs(lambda0() - LAMBDA0) <= 1e-7
        assert abs(g_function(lambda0()) - G0) <= 1e-6
        assert abs(2 * g_function(lambda0()) - 1.4168687) <= 1e-7

    def test_lambda0_equation(self):
        lam = lambda0()
        lp = math.sqrt(1 - lam * lam)
        assert lp ** 2 * oracles.K(lam) * oracles.K(lp) == pytest.approx(math.pi / 2, rel=1e-13)

    def test_g_against_mpmath(self):
        lam = 0.4
        ref = lam * oracles.K(math.sqrt(1 - lam * lam)) / oracles.K(lam)
        assert g_function(lam) == pytest.approx(ref, rel=1e-14)

    def test_concave(self):
        xs = np.linspace(0.05, 0.95, 50)
        g = np.array([g_function(x) for x in xs])
        assert np.all(g[:-2] - 2 * g[1:-1] + g[2:] < 0)

    def test_chord(self):
        for lam in np.arange(0.1, lambda0() - 0.01, 0.05):
            assert g_function(lam) > g_function(lambda0()) * lam

    def test_maximum(self):
        lam = lambda0()
        assert g_function(lam) > g_function(lam - 1e-4)
        assert g_function(lam) > g_function(lam + 1e-4)

    def test_lower_bound(self):
        d = 3.0
        assert rectangle_lower_bound(d, lambda0() * d) == pytest.approx(1.4168687 * d, abs=1e-6)
        assert rectangle_lower_bound(2.0, 1.0) == pytest.approx(2 * g_function(0.5) * 2)
        assert rectangle_lower_bound(1.0, 1.0) == 0.0
        near = [rectangle_lower_bound(1.0, x) for x in (0.99, 0.999, 0.9999)]
        assert near[0] > near[1] > near[2] > 0

    def test_lower_bound_domain(self):
        with pytest.raises(DomainError):
            rectangle_lower_bound(1.0, 1.5)
        with pytest.raises(DomainError):
            g_function(1.0)


class TestShear:
    def test_quarter(self):
        assert C_alpha(0.25) == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-15)

    def test_limits(self):
        assert C_alpha(1e-9) == pytest.approx(1.0, abs=1e-8)
        assert C_alpha(0.5) == 0.0

    def test_reciprocal_identity(self):
        t = math.tan(0.3 * math.pi)
        assert C_alpha(0.3) * (math.sqrt(4 + t * t) + t) ** 2 / 4 == pytest.approx(1.0, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            C_alpha(0.6)


class TestShiftedBound:
    def test_rectangle(self):
        spec = TrapezoidSpec(0.5, 2.0, 2.0)
        assert ml_shifted(spec) == pytest.approx(g_function(lambda0()) * 2.0, rel=1e-15)

    def test_long_case(self):
        spec = TrapezoidSpec.from_alpha_c(0.25, 3.0)
        expected = g_function(lambda0()) * (1 + C_alpha(0.25)) * 4.0
        assert abs(ml_shifted(spec) - expected) <= 1e-12

    def test_short_case(self):
        spec = TrapezoidSpec(0.25, 0.5, 1.5)
        expected = g_function(1 / 3) * (1 + C_alpha(0.25)) * 1.5
        assert abs(ml_shifted(spec) - expected) <= 1e-12

    def test_qr_lower(self, quarter_report):
        assert qr_lower(QUARTER) >= ml_shifted(QUARTER)
        assert qr_lower(QUARTER) == pytest.approx(quarter_report.qr_lower, rel=1e-15)
        rect = TrapezoidSpec(0.5, 1.5, 1.5)
        assert qr_lower(rect) >= 1.4168687 * 1.5


class TestBoundaryCorrespondence:
    def test_interior_origin(self):
        assert boundary_interior(0.0, 0.25, 0.5) == 0.0

    def test_interior_full_base(self):
        ref = oracles.integrate(lambda t: (1 - t * t) ** -0.25 * (1 - 0.25 * t * t) ** -0.75, 0, 1)
        assert boundary_interior(1.0, 0.25, 0.5) == pytest.approx(ref, rel=1e-12)
        assert boundary_interior(1.0, 0.25, 0.5) == pytest.approx(
            interior_integrals(0.25, 0.5)[0], rel=1e-12)

    def test_interior_partial(self):
        ref = oracles.integrate(lambda t: (1 - t * t) ** -0.25 * (1 - 0.25 * t * t) ** -0.75, 0, 0.6)
        assert boundary_interior(0.6, 0.25, 0.5) == pytest.approx(ref, rel=1e-12)

    def test_interior_tail(self):
        lam = 0.5
        x = 3 / lam
        ref = float(mpmath.quad(lambda t: (t * t - 1) ** -0.25 * (lam ** 2 * t * t - 1) ** -0.75,
                                [x, 2 * x, mpmath.inf]))
        assert boundary_interior(x, 0.25, lam) == pytest.approx(ref, rel=1e-11)

    def test_interior_gap(self):
        with pytest.raises(DomainError):
            boundary_interior(1.5, 0.25, 0.5)

    def _exterior_integrand(self, alpha, k):
        A = (0.5 - alpha) * (1 - k * k)
        a2 = math.sqrt(A * A + k * k) - A

        def head(s):
            return (1 - s * s) ** alpha * (1 - k * k * s * s) ** (1 - alpha) / (1 + a2 * s * s) ** 2

        def tail(s):
            return (s * s - 1) ** alpha * (k * k * s * s - 1) ** (1 - alpha) / (1 + a2 * s * s) ** 2

        return head, tail

    def test_exterior_points(self):
        alpha, k = 0.25, 0.4
        head, tail = self._exterior_integrand(alpha, k)
        assert boundary_exterior(0.0, alpha, k) == 0.0
        assert boundary_exterior(0.7, alpha, k) == pytest.approx(
            oracles.integrate(head, 0, 0.7), rel=1e-12)
        assert boundary_exterior(1.0, alpha, k) == pytest.approx(
            oracles.integrate(head, 0, 1), rel=1e-12)
        x = 3 / k
        ref = float(mpmath.quad(tail, [x, 2 * x, mpmath.inf]))
        assert boundary_exterior(x, alpha, k) == pytest.approx(ref, rel=1e-11)
        with pytest.raises(DomainError):
            boundary_exterior(2.0, alpha, k)


class TestEnhancedBound:
    def test_dominates_shifted(self, quarter_report):
        assert quarter_report.ml_enhanced >= quarter_report.ml_shifted

    def test_matches_direct_inversion(self, quarter_report):
        # invert the boundary functions directly with an independent root finder
        spec = QUARTER
        lam, k = quarter_report.lam, quarter_report.k
        delta = min(lambda0() * spec.d, spec.c)
        share = delta / spec.c

        def preimages(F):
            top = F(1.0)
            x1 = 1.0 if share >= 1 else brentq(lambda x: F(x) - share * top, 0.0, 1.0,
                                               xtol=1e-15)
            return x1, top

        x1, top_i = preimages(lambda x: boundary_interior(x, spec.alpha, lam))
        x2 = brentq(lambda x: boundary_interior(x, spec.alpha, lam) - share * top_i,
                    1 / lam * (1 + 1e-12), 1e6, xtol=1e-13)
        y1, top_e = preimages(lambda y: boundary_exterior(y, spec.alpha, k))
        y2 = brentq(lambda y: boundary_exterior(y, spec.alpha, k) - share * top_e,
                    1 / k * (1 + 1e-12), 1e6, xtol=1e-13)
        lt, kt = x1 / x2, y1 / y2
        ref = ellip_K(lt) * ellip_Kp(kt) / (ellip_Kp(lt) * ellip_K(kt))
        assert quarter_report.ml_enhanced == pytest.approx(ref, rel=1e-9)

    def test_rectangle(self):
        spec = TrapezoidSpec(0.5, 1.0, 1.0)
        assert ml_enhanced(spec) >= ml_shifted(spec)

    def test_delta_equals_c(self):
        # c/d < lambda0 puts the shifted point on the vertex of the top base
        spec = TrapezoidSpec(0.25, 0.5, 1.5)
        assert spec.c / spec.d < lambda0()
        assert ml_enhanced(spec) > 0

    @pytest.mark.parametrize("c", [5.0, 20.0, 50.0])
    def test_long_trapezoids(self, c):
        spec = TrapezoidSpec.from_alpha_c(0.25, c)
        assert ml_enhanced(spec) >= ml_shifted(spec)


class TestBoundsReport:
    def test_fields(self, quarter_report):
        d = quarter_report.as_dict()
        assert set(d) == {"lambda", "k", "mod_interior", "mod_exterior", "ml_natural",
                          "ml_shifted", "ml_enhanced", "qr_lower", "qr_upper"}
        assert 0 < d["lambda"] < 1 and 0 < d["k"] < 1
        assert d["qr_upper"] == qr_upper(1.0, 2.0).qr_upper

    @pytest.mark.parametrize("alpha,c", [(0.25, 1.0), (0.25, 0.5), (0.1, 1.0), (0.4, 2.0),
                                         (0.5, 1.0)])
    def test_lower_below_upper(self, alpha, c):
        rep = bounds(TrapezoidSpec.from_alpha_c(alpha, c))
        assert rep.qr_lower <= rep.qr_upper


def test_residue_identity_grid():
    worst = 0.0
    for alpha in np.linspace(0.05, 0.5, 10):
        for k in np.linspace(0.05, 0.95, 10):
            a = exterior_a_of_k(alpha, k)
            b = a / k
            worst = max(worst, abs(alpha / (1 + a * a) + (1 - alpha) / (1 + b * b) - 0.5))
    assert worst <= 1e-12
