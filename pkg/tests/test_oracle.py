import math

import numpy as np
import pytest

from quadmod.errors import DomainError
from quadmod.extmap import QuadSpec, exterior_modulus
from quadmod.oracle import (
    TABLES,
    TableRow,
    dp_height,
    dp_k_of_height,
    dp_modulus_of_height,
    k_of_t,
    load_golden,
    run_table,
)

from . import oracles


class TestKOfT:
    def test_square(self):
        import mpmath
        assert k_of_t(2.0) == pytest.approx(float(3 - 2 * mpmath.sqrt(2)), rel=1e-16)
        assert k_of_t(2.0) == pytest.approx(0.1715728752538083, abs=2e-15)

    def test_small_t(self):
        assert 0 < k_of_t(1 + 1e-12) < 1e-12

    def test_polygon1(self):
        s = math.sqrt(1.966910456214164)
        assert k_of_t(1.966910456214164) == pytest.approx((s - 1) / (s + 1), rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            k_of_t(1.0)


class TestHeight:
    @pytest.mark.parametrize("k,H,tol", [
        (0.1715728752538083, 1.0, 1e-13),
        (0.2589511664373517, 2.0, 1e-12),
        (0.7306010544314864, 50.0, 1e-9),
    ])
    def test_table_values(self, k, H, tol):
        assert abs(dp_height(k) - H) <= tol

    def test_against_mpmath(self):
        import mpmath
        k = mpmath.mpf("0.4")
        kp = mpmath.sqrt(1 - k * k)
        K, E = mpmath.ellipk(k * k), mpmath.ellipe(k * k)
        Kp, Ep = mpmath.ellipk(kp * kp), mpmath.ellipe(kp * kp)
        ref = float(2 * (E - (1 - k) * K) / (Ep - k * Kp))
        assert dp_height(0.4) == pytest.approx(ref, rel=1e-13)

    def test_increasing_in_t(self):
        values = [dp_height(k_of_t(t)) for t in np.geomspace(1.01, 1e4, 40)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_domain(self):
        for bad in (0.0, 1.0):
            with pytest.raises(DomainError):
                dp_height(bad)


class TestInverse:
    @pytest.mark.parametrize("h", [0.2, 1.0, 5.0])
    def test_round_trip(self, h):
        assert dp_height(dp_k_of_height(h)) == pytest.approx(h, abs=1e-10)

    def test_square(self):
        assert dp_modulus_of_height(1.0) == pytest.approx(1.0, abs=1e-13)

    def test_table_moduli(self):
        assert dp_modulus_of_height(0.5) == pytest.approx(1.154924858699707, abs=1e-12)
        assert dp_modulus_of_height(0.1) == pytest.approx(1.580900257847724, abs=1e-12)

    def test_modulus_matches_mu(self):
        k = dp_k_of_height(3.0)
        assert dp_modulus_of_height(3.0) == pytest.approx(oracles.mu(k) / math.pi, rel=1e-12)

    def test_domain(self):
        for bad in (0.0, -1.0, math.inf):
            with pytest.raises(DomainError):
                dp_modulus_of_height(bad)

    def test_cross_oracle_grid(self):
        worst = 0.0
        for h in np.linspace(0.5, 10.0, 20):
            M = exterior_modulus(QuadSpec(1j * h, 1 + 1j * h)).M
            worst = max(worst, abs(M - dp_modulus_of_height(1.0 / h)))
        assert worst <= 1e-8


class TestGolden:
    def test_loaded_rows(self):
        cases = load_golden()
        by_table = {name: [c for c in cases if c.table == name] for name in TABLES}
        assert len(by_table["table1"]) == 2
        assert len(by_table["table3"]) == 9
        heights = {c.height for c in by_table["table2"]}
        assert {1, 2, 3, 4, 5, 10, 50, 100, 1e3, 1e4, 1e5, 1e6} <= heights

    def test_scopes(self):
        for c in load_golden():
            if c.table == "table2" and c.height >= 1e5:
                assert c.scope == "excluded"
            elif c.table == "table2" and c.height >= 1e3:
                assert c.scope == "extended" and c.tol_kind == "rel"
            else:
                assert c.scope == "default"

    def test_row_error(self):
        row = TableRow("x", {}, "M", 1.0, 1.0 + 2e-10, 1e-9)
        assert row.abs_err == pytest.approx(2e-10)
        assert row.passed
        assert not TableRow("y", {}, "M", 1.0, 1.1, 1e-9).passed

    def test_unknown_table(self):
        with pytest.raises(DomainError):
            run_table("table4")

    def test_table1(self):
        rows = run_table("table1")
        assert [r.id for r in rows] == ["T1-1", "T1-2"]
        assert all(r.passed for r in rows)

    def test_table3_examples(self):
        rows = run_table("table3")
        assert len(rows) == 9 and all(r.passed for r in rows)
        by_vertices = {(r.inputs["A3"], r.inputs["A4"]): r for r in rows}
        assert by_vertices[(-1 + 2j, 7 + 5j)].expected == 1.158095606321043
        assert by_vertices[(1j, 1 + 1j)].expected == 0.999999999999995

    def test_table2_default(self):
        rows = run_table("table2")
        heights = sorted({r.inputs["H"] for r in rows})
        assert heights == [1, 2, 3, 4, 5, 10, 50, 100]
        assert all(r.passed for r in rows)

    @pytest.mark.slow
    def test_table2_extended(self):
        rows = run_table("table2", extended=True)
        assert {r.inputs["H"] for r in rows} >= {1e3, 1e4}
        assert all(r.passed for r in rows)
