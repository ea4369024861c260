"""Command-line interface.

Subcommands
-----------
extmod
    Exterior modulus of the quadrilateral with vertices 1, 0, A3, A4.
trapezoid {interior,exterior,bounds}
    Moduli and reflection-coefficient bounds of an isosceles trapezoid.
validate
    Recompute one golden table and print it as CSV.
grid
    Write the image of a rectangular mesh under the exterior map as CSV.

Results are printed as a JSON envelope with the keys ``command``,
``inputs``, ``outputs`` and ``diagnostics``. Floats are written with
``repr`` and therefore read back to the identical double.

Exit codes: 0 success, 1 golden-table mismatch, 2 invalid input or
geometry, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from typing import Callable, Dict, Optional, Sequence

from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    QuadmodError,
    RootSelectionError,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

_COMPLEX_RE = re.compile(
    r"""^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
         (?:(?P<sign>[+-])(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij])?$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse ``"x+yi"`` (spaces allowed, ``j`` accepted for ``i``).

    Pure real (``"2"``) and pure imaginary (``"2i"``, ``"-i"``) forms are
    accepted as well.
    """
    s = text.replace(" ", "")
    if not s:
        raise argparse.ArgumentTypeError("empty complex literal")
    m = re.fullmatch(r"([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij]", s)
    if m:
        mag = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -mag if m.group(1) == "-" else mag)
    m = _COMPLEX_RE.fullmatch(s)
    if not m or m.group("re") is None:
        raise argparse.ArgumentTypeError(f"cannot parse complex literal {text!r}")
    re_part = float(m.group("re"))
    if m.group("sign") is None:
        return complex(re_part, 0.0)
    im = float(m.group("im")) if m.group("im") else 1.0
    return complex(re_part, -im if m.group("sign") == "-" else im)


class CommandError(Exception):
    """Failure carrying its exit code and the stage that failed."""

    def __init__(self, code: int, stage: str, message: str):
        super().__init__(message)
        self.code = code
        self.stage = stage


def _stage(name: str, fn: Callable, *args, **kwargs):
    """Run one stage, translating library errors to exit codes."""
    try:
        return fn(*args, **kwargs)
    except DomainError as exc:
        raise CommandError(EXIT_INPUT, name, str(exc)) from exc
    except (RootSelectionError, BracketError, ConvergenceError) as exc:
        raise CommandError(EXIT_SOLVER, name, f"{type(exc).__name__}: {exc}") from exc
    except QuadmodError as exc:
        raise CommandError(EXIT_SOLVER, name, str(exc)) from exc


def _check_finite(section: str, values: Dict[str, object]):
    for key, v in values.items():
        if isinstance(v, float) and not math.isfinite(v):
            raise CommandError(EXIT_SOLVER, "output", f"{section}.{key} is not finite ({v})")


def envelope(command: str, inputs: dict, outputs: dict, diagnostics: dict) -> str:
    """Serialise a result envelope deterministically."""
    _check_finite("outputs", outputs)
    _check_finite("diagnostics", diagnostics)
    doc = {"command": command, "inputs": inputs, "outputs": outputs,
           "diagnostics": diagnostics}
    return json.dumps(doc, indent=2, allow_nan=False)


def _complex_inputs(a3: complex, a4: complex) -> dict:
    return {"a3_re": a3.real, "a3_im": a3.imag, "a4_re": a4.real, "a4_im": a4.imag}


def _solver_options(args):
    from .extmap import SolverOptions
    return _stage("options", SolverOptions, n=args.n, wp=args.wp)


def _solve_quadrilateral(args):
    from .extmap import QuadSpec, angles_from_vertices, exterior_modulus
    opts = _solver_options(args)
    q = _stage("geometry", QuadSpec, args.a3, args.a4)
    _stage("angles", angles_from_vertices, q)
    return _stage("modulus", exterior_modulus, q, opts), opts


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_extmod(args, out) -> int:
    report, opts = _solve_quadrilateral(args)
    inputs = dict(_complex_inputs(args.a3, args.a4), n=args.n, wp=args.wp)
    diagnostics = {
        "residual": report.residual, "iterations": report.iterations,
        "quad_error": report.quad_error, "closure_defect": report.closure_defect,
        "bracket_exponent": report.n,
    }
    print(envelope("extmod", inputs, report.as_dict(), diagnostics), file=out)
    return EXIT_OK


def _trapezoid_spec(args):
    from .trapezoid import TrapezoidSpec
    return _stage("geometry", TrapezoidSpec.from_alpha_c, args.alpha, args.c)


def cmd_trapezoid(args, out) -> int:
    from . import trapezoid as tz
    spec = _trapezoid_spec(args)
    inputs = {"alpha": args.alpha, "c": args.c}
    outputs: Dict[str, object] = {"d": spec.d}
    diagnostics: Dict[str, object] = {"rectangle": spec.is_rectangle}

    if args.which == "interior":
        if spec.is_rectangle:
            lam = _stage("interior", tz.interior_lambda_rectangle, spec.c)
        else:
            lam = _stage("interior", tz.interior_lambda, spec)
            i1, i2 = _stage("interior", tz.interior_integrals, spec.alpha, lam)
            diagnostics["base_ratio_defect"] = abs(i2 / i1 - spec.d / spec.c)
        outputs["lambda"] = lam
        outputs["mod_interior"] = _stage("interior", tz.interior_modulus, spec)
    elif args.which == "exterior":
        if spec.is_rectangle:
            k = _stage("exterior", tz.exterior_k_rectangle, spec.d)
        else:
            k = _stage("exterior", tz.exterior_k, spec)
            n, m = _stage("exterior", tz.exterior_integrals, spec.alpha, k)
            diagnostics["base_ratio_defect"] = abs(m / n - spec.d / spec.c)
        outputs["k"] = k
        outputs["a"] = _stage("exterior", tz.exterior_a_of_k, spec.alpha, k)
        outputs["mod_exterior"] = _stage("exterior", tz.exterior_modulus, spec)
    else:
        from .starlike import qr_upper
        report = _stage("bounds", tz.bounds, spec)
        star = _stage("starlike", qr_upper, spec.c, spec.d)
        outputs.update(report.as_dict())
        outputs.update({"centre_s": star.s, "tau": star.tau,
                        "starlike_order": star.alpha_order})
        diagnostics["lambda0"] = tz.lambda0()
        diagnostics["lower_le_upper"] = report.qr_lower <= report.qr_upper
    print(envelope("trapezoid " + args.which, inputs, outputs, diagnostics), file=out)
    return EXIT_OK


def _inputs_text(inputs: dict) -> str:
    parts = []
    for key, v in inputs.items():
        if isinstance(v, complex):
            parts.append(f"{key}={v.real!r}{v.imag:+}i")
        else:
            parts.append(f"{key}={v!r}")
    return " ".join(parts)


def cmd_validate(args, out) -> int:
    from .oracle import run_table
    name = f"table{args.table}"
    rows = _stage("validate", run_table, name, extended=args.extended)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "inputs", "quantity", "expected", "computed", "abs_err",
                "tol", "status"])
    failures = []
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        w.writerow([r.id, _inputs_text(r.inputs), r.quantity, repr(r.expected),
                    repr(r.computed), repr(r.abs_err), repr(r.tol), status])
        if not r.passed:
            failures.append(r)
    for r in failures:
        print(f"{r.id}: |{r.computed!r} - {r.expected!r}| = {r.abs_err:.3e} "
              f"> {r.tol:.1e}", file=sys.stderr)
    return EXIT_MISMATCH if failures else EXIT_OK


def cmd_grid(args, out) -> int:
    from .extmap import grid_image, write_grid_csv
    try:
        fh = open(args.out, "w", newline="")
    except OSError as exc:
        raise CommandError(EXIT_INPUT, "output", f"cannot write {args.out}: {exc}") from exc
    with fh:
        report, opts = _solve_quadrilateral(args)
        points = _stage("grid", grid_image, report.angles, report.t, report.z0,
                        (args.re_min, args.re_max), (args.im_min, args.im_max),
                        args.nx, args.ny, opts.quadrature)
        write_grid_csv(points, fh)
    inputs = dict(_complex_inputs(args.a3, args.a4), n=args.n, wp=args.wp,
                  re_min=args.re_min, re_max=args.re_max, im_min=args.im_min,
                  im_max=args.im_max, nx=args.nx, ny=args.ny)
    outputs = {"path": args.out, "points": len(points), "M": report.M, "t": report.t,
               "z0_re": report.z0.real, "z0_im": report.z0.imag}
    diagnostics = {"skipped": sum(p.skipped for p in points),
                   "residual": report.residual, "iterations": report.iterations}
    print(envelope("grid", inputs, outputs, diagnostics), file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_quadrilateral(p: argparse.ArgumentParser):
    p.add_argument("--a3", type=parse_complex, required=True,
                   help='vertex A3 as "x+yi"; use --a3=... for negative real parts')
    p.add_argument("--a4", type=parse_complex, required=True, help="vertex A4")
    p.add_argument("--n", type=float, default=2.0,
                   help="bracket exponent: t is searched in [1, 10**n] (default 2)")
    p.add_argument("--wp", type=int, default=12,
                   help="quadrature tolerance 10**-wp (default 12)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadmod",
        description="Conformal moduli of polygonal quadrilaterals and trapezoid bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extmod", help="exterior modulus of the quadrilateral 1, 0, A3, A4")
    _add_quadrilateral(p)
    p.set_defaults(func=cmd_extmod)

    p = sub.add_parser("trapezoid", help="isosceles trapezoid moduli and bounds")
    p.add_argument("which", choices=("interior", "exterior", "bounds"))
    p.add_argument("--alpha", type=float, required=True,
                   help="acute angle over pi, in (0, 1/2]")
    p.add_argument("--c", type=float, required=True, help="half-length of the short base")
    p.set_defaults(func=cmd_trapezoid)

    p = sub.add_parser("validate", help="recompute a golden table")
    p.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--extended", action="store_true",
                   help="include the large-height rows of table 2")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("grid", help="image of a rectangular mesh as CSV")
    _add_quadrilateral(p)
    p.add_argument("--re-min", type=float, default=-2.0)
    p.add_argument("--re-max", type=float, default=4.0)
    p.add_argument("--im-min", type=float, default=0.0)
    p.add_argument("--im-max", type=float, default=3.0)
    p.add_argument("--nx", type=int, default=25)
    p.add_argument("--ny", type=int, default=13)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CommandError as exc:
        print(f"quadmod {args.command}: {exc.stage} failed: {exc}", file=sys.stderr)
        return exc.code
