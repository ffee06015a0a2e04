"""Command line surface: emit matrices, run check suites, sweep parameters.

Exit codes: 0 all checks passed / output written, 1 check failure or
construction error (JSON error object on stderr), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import latexfmt
from .bundles import (UlrichSpec, automorphy_cocycle_residual,
                      automorphy_transport_residual, build_algebraic,
                      build_analytic, calibrate_scalars, curve_sample_points,
                      derivative_elimination_fit, elimination_consequence_residual,
                      equilibrate, jet_kernel_residual, offcurve_sample_triples,
                      relation_annihilation_residual, relation_matrix,
                      verify_factorization, verify_presentation)
from .curve import CurveConfig, ProjectivePoint, embed, is_three_torsion, on_curve
from .errors import HesseCubicError
from .moore import (l_matrix, moore_derivative, moore_matrix,
                    theta_relation_residuals)
from .poly import PolyMatrix, det, hesse_form, numeric_rank, scalar_fit_residual
from .report import CheckReport, check
from .theta import ThetaContext, basis_provenance, hesse_psi, theta_vector

MUTATIONS = ("zero-block", "drop-binomial", "perturb-psi")


def parse_complex(text: str) -> complex:
    """Parse 're+imi' or 're+imj' or a bare real; 'i' alone is the unit."""
    s = text.strip().replace(" ", "").replace("i", "j")
    s = re.sub(r"(?<![\d.])([+-]?)j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from exc


def parse_point(text: str):
    """Either a complex a_z or a comma-separated projective triple."""
    if "," in text:
        return ProjectivePoint.from_coords([parse_complex(t) for t in text.split(",")])
    return parse_complex(text)


def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("k must be non-negative")
    return value


def parse_int_list(text: str) -> list[int]:
    """Comma list or inclusive lo:hi range."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _write_output(payload: str, out: str):
    if out == "-":
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _fail(message: str) -> int:
    sys.stderr.write(json.dumps({"error": message}) + "\n")
    return 1


# ---------------------------------------------------------------------------
# emit
# ---------------------------------------------------------------------------

def run_emit(args) -> int:
    ctx = ThetaContext(tau=args.tau)
    psi = hesse_psi(ctx)
    cfg = CurveConfig(psi=psi)

    a_z = None
    if isinstance(args.a, ProjectivePoint):
        point = args.a
        residual = on_curve(point, cfg)
        if residual > 1e-6:
            return _fail(f"point is not on the curve (residual {residual:.3e})")
    else:
        a_z = args.a
        point = embed(a_z, ctx)
    if is_three_torsion(point, cfg):
        return _fail("point in E[3]")

    bundle: dict = {
        "tau": [ctx.tau.real, ctx.tau.imag],
        "psi": [psi.real, psi.imag],
        "k": args.k,
        "point": point.to_json(),
        "provenance": basis_provenance(),
    }
    matrices: dict[str, PolyMatrix] = {
        "M": moore_matrix(point),
        "L": l_matrix(point),
    }
    if args.k >= 1:
        if a_z is not None:
            spec = UlrichSpec(k=args.k, ctx=ctx, a_z=a_z)
            a_mat, b_mat = build_analytic(spec)
            matrices["A_analytic"] = a_mat
            matrices["B_analytic"] = b_mat
            lambdas, _ = calibrate_scalars(spec)
            bundle["lambdas"] = [[l.real, l.imag] for l in lambdas]
            matrices["A_algebraic"] = build_algebraic(spec, lambdas)
        else:
            spec = UlrichSpec(k=args.k, ctx=ctx, point=point)
            matrices["A_algebraic"] = build_algebraic(spec)
            bundle["lambdas"] = None

    if args.format == "json":
        bundle["matrices"] = {name: m.to_json() for name, m in matrices.items()}
        _write_output(json.dumps(bundle, sort_keys=True, indent=1), args.out)
    else:
        lines = [f"% tau = {ctx.tau}, psi = {psi}, k = {args.k}"]
        for name, m in matrices.items():
            lines.append(f"% {name}")
            lines.append(latexfmt.matrix_to_latex(m))
        _write_output("\n".join(lines), args.out)
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _theta_checks(ctx: ThetaContext, rng) -> list[CheckReport]:
    psi = hesse_psi(ctx)
    w = hesse_form(psi)
    worst = 0.0
    for _ in range(10):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        worst = max(worst, abs(w(theta_vector(z, ctx))))
    reports = [check("theta.hesse_identity", worst, 1e-9, {"tau": ctx.tau})]

    sym = 0.0
    for _ in range(5):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        v = theta_vector(z, ctx)
        m = theta_vector(-z, ctx)
        sym = max(sym, abs(m[0] + v[0]), abs(m[1] + v[2]), abs(m[2] + v[1]))
    reports.append(check("theta.symmetry", sym, 1e-9, {"tau": ctx.tau}))
    reports.append(check("theta.psi_nondegenerate", ctx.check_tol / abs(psi ** 3 + 1),
                         1.0, {"psi": psi}))
    return reports


def _moore_checks(ctx: ThetaContext, psi: complex, rng, max_order: int = 4) -> list[CheckReport]:
    reports = []
    a_grid = [0.23, 0.31 + 0.07j, -0.19 + 0.11j]
    z_grid = [0.11, -0.27 + 0.09j, 0.41 + 0.13j]
    for order in range(max_order + 1):
        worst = 0.0
        tol = 0.0
        for a_z in a_grid:
            for z in z_grid:
                rep = theta_relation_residuals(a_z, z, ctx, order)
                worst = max(worst, rep.residual)
                tol = rep.tol
        reports.append(check(f"moore.relation.order{order}", worst, tol,
                             {"grid": [len(a_grid), len(z_grid)]}))

    w_id = PolyMatrix.diagonal(hesse_form(psi), 3)
    worst_ml = worst_lm = worst_off = worst_det = 0.0
    for p in curve_sample_points(ctx, 20, int(rng.integers(1 << 30))):
        m, l = moore_matrix(p), l_matrix(p)
        ml, lm = m @ l, l @ m
        worst_ml = max(worst_ml, (ml - w_id).coefficient_norm())
        worst_lm = max(worst_lm, (lm - w_id).coefficient_norm())
        worst_off = max(worst_off, max(ml.entries[i][j].norm()
                                       for i in range(3) for j in range(3) if i != j))
        scalar, fit = scalar_fit_residual(det(m), hesse_form(psi))
        prod = p.coords[0] * p.coords[1] * p.coords[2]
        worst_det = max(worst_det, fit, abs(scalar - prod) / abs(prod))
    reports.append(check("moore.ml_identity", worst_ml, 1e-8, {"samples": 20}))
    reports.append(check("moore.lm_identity", worst_lm, 1e-8, {"samples": 20}))
    reports.append(check("moore.offdiagonal", worst_off, 1e-12, {"samples": 20}))
    reports.append(check("moore.det_scalar", worst_det, 1e-8, {"samples": 20}))
    return reports


def _mutate_analytic(a: PolyMatrix, b: PolyMatrix, k: int, mutate: str,
                     ctx: ThetaContext, a_z: complex):
    if mutate == "zero-block":
        for i in range(3):
            for j in range(3, 6 if a.cols >= 6 else a.cols):
                a.entries[i][j] = a.entries[i][j] * 0.0
    elif mutate == "drop-binomial" and k >= 2:
        # block (0,1) carries C(k,1): rebuild it with coefficient 1
        m1 = moore_derivative(a_z, ctx, 1)
        for i in range(3):
            for j in range(3):
                a.entries[i][3 + j] = m1.entries[i][j]
    return a, b


def _factorization_checks(ctx: ThetaContext, psi: complex, a_z: complex, k_max: int,
                          mutate: str | None) -> list[CheckReport]:
    reports = []
    for k in range(1, k_max + 1):
        spec = UlrichSpec(k=k, ctx=ctx, a_z=a_z)
        a, b = build_analytic(spec)
        if mutate in ("zero-block", "drop-binomial"):
            a, b = _mutate_analytic(a, b, k, mutate, ctx, a_z)
        use_psi = psi + 1e-3 if mutate == "perturb-psi" else psi
        tol = 1e-8 if k == 1 else 1e-7
        for rep in verify_factorization(a, b, use_psi, tol=tol):
            rep.name = f"{rep.name}.k{k}"
            reports.append(rep)
    return reports


def _presentation_checks(ctx: ThetaContext, psi: complex, a_z: complex, k_max: int,
                         seed: int) -> list[CheckReport]:
    reports = []
    on = curve_sample_points(ctx, 10, seed)
    off = offcurve_sample_triples(psi, 10, seed + 1)
    for k in range(1, min(k_max, 3) + 1):
        spec = UlrichSpec(k=k, ctx=ctx, a_z=a_z)
        a_an, _ = build_analytic(spec)
        for rep in verify_presentation(a_an, psi, k, on, off):
            rep.name = f"{rep.name}.analytic.k{k}"
            reports.append(rep)
        lambdas, cal_reports = calibrate_scalars(spec)
        for rep in cal_reports:
            rep.name = f"{rep.name}.k{k}"
            reports.append(rep)
        a_alg = build_algebraic(spec, lambdas)
        for rep in verify_presentation(a_alg, psi, k, on, off):
            rep.name = f"{rep.name}.algebraic.k{k}"
            reports.append(rep)
    return reports


def _automorphy_checks(ctx: ThetaContext, a_z: complex, k_max: int) -> list[CheckReport]:
    reports = []
    z = 0.13 + 0.05j
    for k in range(1, min(k_max, 3) + 1):
        spec = UlrichSpec(k=k, ctx=ctx, a_z=a_z)
        worst = max(automorphy_transport_residual(spec, 1.0, z),
                    automorphy_transport_residual(spec, ctx.tau, z))
        reports.append(check(f"automorphy.transport.k{k}", worst, 1e-7, {"z": z}))
        reports.append(check(f"automorphy.cocycle.k{k}",
                             automorphy_cocycle_residual(spec, z), 1e-7, {"z": z}))
    return reports


def _elimination_checks(ctx: ThetaContext, a_z: complex) -> list[CheckReport]:
    points = [a_z, a_z + 0.1, a_z - 0.07 + 0.1j, 0.2, 0.41 + 0.1j]
    fits = [derivative_elimination_fit(p, ctx) for p in points]
    worst_fit = max(f[2] for f in fits)
    c0 = fits[0][1]
    drift = max(abs(f[1] - c0) / abs(c0) for f in fits)
    return [
        check("elimination.fit", worst_fit, 1e-8, {"points": len(points)}),
        check("elimination.c_constancy", drift, 1e-6, {"c": c0}),
        check("elimination.consequence", elimination_consequence_residual(a_z, ctx),
              1e-7, {"a_z": a_z}),
    ]


def _bookkeeping_checks(ctx: ThetaContext, a_z: complex) -> list[CheckReport]:
    spec = UlrichSpec(k=1, ctx=ctx, a_z=a_z)
    worst = max(relation_annihilation_residual(spec, z) for z in (0.11, 0.29 + 0.07j))
    rank = numeric_rank(equilibrate(relation_matrix(spec)))
    return [
        check("bookkeeping.annihilation.k1", worst, 1e-7, {"a_z": a_z}),
        check("bookkeeping.relation_rank.k1", float(abs(rank - 6)), 0.5, {"rank": rank}),
        check("bookkeeping.kernel_jets.k1", jet_kernel_residual(spec, 0.11), 1e-7, {}),
    ]


def build_check_suite(tau: complex, a_z: complex, k_max: int, seed: int,
                      mutate: str | None = None) -> list[CheckReport]:
    ctx = ThetaContext(tau=tau)
    psi = hesse_psi(ctx)
    rng = np.random.default_rng(seed)
    reports = _theta_checks(ctx, rng)
    reports += _moore_checks(ctx, psi + 1e-3 if mutate == "perturb-psi" else psi, rng)
    reports += _factorization_checks(ctx, psi, a_z, k_max, mutate)
    reports += _presentation_checks(ctx, psi, a_z, k_max, seed)
    reports += _automorphy_checks(ctx, a_z, k_max)
    reports += _elimination_checks(ctx, a_z)
    reports += _bookkeeping_checks(ctx, a_z)
    return reports


def run_check(args) -> int:
    if isinstance(args.a, ProjectivePoint):
        return _fail("the check suite needs an analytic point --a (complex a_z)")
    if args.mutate == "drop-binomial" and args.k < 2:
        return _fail("drop-binomial only exists for k >= 2")
    reports = build_check_suite(args.tau, args.a, args.k, args.seed, args.mutate)
    if args.tol is not None:
        for rep in reports:
            rep.tol = args.tol
            rep.passed = rep.residual < args.tol
    for rep in reports:
        sys.stdout.write(rep.to_json() + "\n")
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_config(tau: complex, a_z: complex, k: int, seed: int) -> list[CheckReport]:
    ctx = ThetaContext(tau=tau)
    psi = hesse_psi(ctx)
    w = hesse_form(psi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        worst = max(worst, abs(w(theta_vector(z, ctx))))
    reports = [check("theta.hesse_identity", worst, 1e-9, {})]
    for order in (0, 1):
        rep = theta_relation_residuals(a_z, 0.11, ctx, order)
        rep.name = f"moore.relation.order{order}"
        reports.append(rep)
    if k >= 1:
        spec = UlrichSpec(k=k, ctx=ctx, a_z=a_z)
        a, b = build_analytic(spec)
        reports.extend(verify_factorization(a, b, psi, tol=1e-7))
        s, c, fit = derivative_elimination_fit(a_z, ctx)
        reports.append(check("elimination.fit", fit, 1e-8, {}))
    return reports


def run_sweep(args) -> int:
    taus = [parse_complex(t) for t in args.taus.split(",")] if args.taus else []
    azs = [parse_complex(t) for t in args.azs.split(",")] if args.azs else []
    ks = parse_int_list(args.ks) if args.ks else []
    aggregate: dict[str, float] = {}
    lines = []
    for tau in taus:
        for a_z in azs:
            for k in ks:
                for rep in _sweep_config(tau, a_z, k, args.seed):
                    record = rep.to_dict()
                    record["config"] = {"tau": [tau.real, tau.imag],
                                        "a": [a_z.real, a_z.imag], "k": k}
                    lines.append(json.dumps(record, sort_keys=True))
                    key = rep.name
                    aggregate[key] = max(aggregate.get(key, 0.0), rep.residual)
    for name in sorted(aggregate):
        lines.append(json.dumps({"aggregate": name, "max_residual": aggregate[name]},
                                sort_keys=True))
    payload = "\n".join(lines)
    _write_output(payload if payload else "", args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hessecubic",
        description="Emit and verify Moore-matrix presentations on the Hesse cubic.")
    sub = parser.add_subparsers(dest="command", required=True)

    emit = sub.add_parser("emit", help="write the matrix bundle for (tau, a, k)")
    emit.add_argument("--tau", type=parse_complex, default=1j)
    emit.add_argument("--a", type=parse_point, default=0.3 + 0j,
                      help="analytic point a_z or projective triple c0,c1,c2")
    emit.add_argument("--k", type=non_negative_int, default=1)
    emit.add_argument("--format", choices=("json", "latex"), default="json")
    emit.add_argument("--out", default="-")
    emit.set_defaults(func=run_emit)

    chk = sub.add_parser("check", help="run the verification suite")
    chk.add_argument("--tau", type=parse_complex, default=1j)
    chk.add_argument("--a", type=parse_point, default=0.3 + 0j)
    chk.add_argument("--k", type=non_negative_int, default=3)
    chk.add_argument("--seed", type=int, default=42)
    chk.add_argument("--tol", type=float, default=None,
                     help="override every tolerance in the suite")
    chk.add_argument("--mutate", choices=MUTATIONS, default=None,
                     help="sanity hook: break the construction on purpose")
    chk.set_defaults(func=run_check)

    swp = sub.add_parser("sweep", help="grid over (tau, a, k), aggregate residuals")
    swp.add_argument("--taus", default="", help="comma-separated tau values")
    swp.add_argument("--azs", default="", help="comma-separated a_z values")
    swp.add_argument("--ks", default="", help="comma list or lo:hi range of k")
    swp.add_argument("--seed", type=int, default=42)
    swp.add_argument("--out", default="-")
    swp.set_defaults(func=run_sweep)
    return parser


_VALUE_FLAGS = ("--tau", "--a", "--taus", "--azs", "--tol")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ['--a', '-0.17+0.11i'] into ['--a=-0.17+0.11i'].

    argparse would otherwise read a leading-dash value as an option.
    """
    out = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = make_parser().parse_args(_join_negative_values(list(argv)))
    try:
        return args.func(args)
    except HesseCubicError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
