"""Closed-form rectangle moduli and the golden-table harness.

For the rectangle with vertices 1, 0, iH, 1 + iH the prevertex ``t`` of the
exterior map determines ``k = (sqrt(t) - 1)/(sqrt(t) + 1)``, and the height is
recovered in closed form as

    H = psi(k) = 2 (E(k) - (1 - k) K(k)) / (E(k') - k K(k')).

Inverting ``psi`` gives an exterior modulus independent of any quadrature,
``DP(h) = mu(psi^-1(h)) / pi``, which equals the exterior modulus of the
rectangle of height ``1/h``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional

from scipy.optimize import bisect

from .errors import BracketError, DomainError
from .extmap import QuadSpec, SolverOptions, exterior_modulus
from .specfun import ellip_KE, moduli_from_ratio

__all__ = [
    "k_of_t",
    "dp_height",
    "dp_k_of_height",
    "dp_modulus_of_height",
    "TableRow",
    "GoldenCase",
    "load_golden",
    "run_table",
    "TABLES",
]

TABLES = ("table1", "table2", "table3")


def k_of_t(t: float) -> float:
    """Modulus ``(sqrt(t) - 1)/(sqrt(t) + 1)`` of the symmetric prevertex set."""
    if not t > 1:
        raise DomainError(f"t must exceed 1, got {t}")
    s = math.sqrt(t)
    return (t - 1.0) / (s + 1.0) ** 2


def _psi(k: float, kp: float) -> float:
    K, E = ellip_KE(k, kp)
    Kp, Ep = ellip_KE(kp, k)
    one_minus_k = kp * kp / (1.0 + k)
    return 2.0 * (E - one_minus_k * K) / (Ep - k * Kp)


def dp_height(k: float) -> float:
    """Height ``H`` of the rectangle whose exterior map has parameter ``k``."""
    if not 0 < k < 1:
        raise DomainError(f"dp_height requires 0 < k < 1, got {k}")
    return _psi(k, math.sqrt((1.0 - k) * (1.0 + k)))


def _ratio_of_height(h: float) -> float:
    """``p = K(k')/K(k)`` at ``k = psi^-1(h)``; psi decreases in p."""
    if not h > 0 or not math.isfinite(h):
        raise DomainError(f"height must be positive and finite, got {h}")

    def f(logp):
        return _psi(*moduli_from_ratio(math.exp(logp))) - h

    lo, hi = -1.0, 1.0
    for _ in range(60):
        if f(lo) > 0:
            break
        lo *= 2.0
    for _ in range(60):
        if f(hi) < 0:
            break
        hi *= 2.0
    if not (f(lo) > 0 > f(hi)):
        raise BracketError(f"could not bracket psi^-1({h})")
    return math.exp(bisect(f, lo, hi, xtol=1e-15, maxiter=200))


def dp_k_of_height(h: float) -> float:
    """``psi^-1(h)``: the parameter ``k`` for a rectangle of height ``h``."""
    return moduli_from_ratio(_ratio_of_height(h))[0]


def dp_modulus_of_height(h: float) -> float:
    """``mu(psi^-1(h)) / pi``, the exterior modulus of height ``1/h``."""
    return 0.5 * _ratio_of_height(h)


# ---------------------------------------------------------------------------
# Golden tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoldenCase:
    id: str
    table: str
    A3: complex
    A4: complex
    height: Optional[float]
    quantity: str
    expected: float
    tol: float
    tol_kind: str
    scope: str
    source: str

    def tolerance_for(self, expected: float) -> float:
        return self.tol * abs(expected) if self.tol_kind == "rel" else self.tol


@dataclass(frozen=True)
class TableRow:
    """One golden comparison."""

    id: str
    inputs: Dict[str, object]
    quantity: str
    expected: float
    computed: float
    tol: float
    abs_err: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "abs_err", abs(self.expected - self.computed))

    @property
    def passed(self) -> bool:
        return self.abs_err <= self.tol


def load_golden() -> List[GoldenCase]:
    """All embedded golden cases, in file order."""
    text = resources.files("quadmod").joinpath("data/golden.csv").read_text()
    out = []
    for r in csv.DictReader(text.splitlines()):
        out.append(GoldenCase(
            id=r["id"], table=r["table"],
            A3=complex(float(r["a3_re"]), float(r["a3_im"])),
            A4=complex(float(r["a4_re"]), float(r["a4_im"])),
            height=float(r["height"]) if r["height"] else None,
            quantity=r["quantity"], expected=float(r["expected"]),
            tol=float(r["tol"]), tol_kind=r["tol_kind"],
            scope=r["scope"], source=r["source"],
        ))
    return out


def _computed(case: GoldenCase, report) -> float:
    if case.quantity == "M":
        return report.M
    k = k_of_t(report.t)
    if case.quantity == "k":
        return k
    if case.quantity == "H":
        return dp_height(k)
    raise DomainError(f"unknown golden quantity {case.quantity!r}")


def run_table(name: str, extended: bool = False,
              opts: Optional[SolverOptions] = None) -> List[TableRow]:
    """Recompute every golden row of ``name`` and compare.

    Rows scoped ``extended`` run only when ``extended`` is true; rows scoped
    ``excluded`` never run.
    """
    if name not in TABLES:
        raise DomainError(f"unknown table {name!r}; choose from {TABLES}")
    scopes = {"default", "extended"} if extended else {"default"}
    cases = [c for c in load_golden() if c.table == name and c.scope in scopes]
    reports = {}
    rows = []
    for case in cases:
        key = (case.A3, case.A4)
        if key not in reports:
            reports[key] = exterior_modulus(QuadSpec(case.A3, case.A4), opts)
        computed = _computed(case, reports[key])
        inputs: Dict[str, object] = {"A3": case.A3, "A4": case.A4}
        if case.height is not None:
            inputs = {"H": case.height}
        rows.append(TableRow(case.id, inputs, case.quantity, case.expected,
                             computed, case.tolerance_for(case.expected)))
    return rows
