"""Command-line interface: ``orbizeta <subcommand> [options]``.

Exit status is 0 on success, 1 on a usage error and 2 when a verification
asserted by the subcommand fails.  JSON output has a fixed field order and
shortest round-trip floats, so identical invocations give identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cache, index, kernels, localode, spectra
from .classes import WordCapExceeded
from .groupfile import GroupFileError, export_group_text, load_group_file
from .groups import PresentedGroup, Signature, builtin
from .moebius import NORM_CONVENTIONS, Kind, act, classify, elliptic_order, fixpoint_elliptic

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------- helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return repr(x)
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n")
        return
    rows = report.get("rows")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        cols = list(rows[0])
        w.writerow(cols)
        for r in rows:
            w.writerow([_csv_cell(r[c]) for c in cols])
    else:
        w.writerow(["key", "value"])
        for k, v in report.items():
            if k != "rows":
                w.writerow([k, _csv_cell(v)])
    out.write(buf.getvalue())


def _csv_cell(v) -> str:
    v = _jsonable(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def _group(source: str) -> PresentedGroup:
    if source.startswith("builtin:"):
        return builtin(source)
    p = Path(source)
    if not p.exists():
        raise UsageError(f"group {source!r} is neither builtin:<name> nor an existing file")
    return load_group_file(p)


def _point(text: str) -> complex:
    try:
        z = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}") from None
    if not z.imag > 0:
        raise UsageError(f"point {text!r} is not in the upper half-plane")
    return z


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _int_list(text: str) -> list[int]:
    out = []
    for part in (x.strip() for x in text.split(",")):
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep and lo else [int(part)])
        except ValueError:
            raise UsageError(f"cannot parse integer list {text!r}") from None
    return out


def _signature(text: str) -> Signature:
    try:
        return Signature.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _result(res: spectra.TruncatedSumResult) -> dict:
    return {"value": res.value, "tail": res.tail, "terms": res.terms, "nmax": res.n_max,
            "imax": res.i_max, "log_value": res.log_value, "accumulator": res.accumulator}


def _cache_dir(args):
    return Path(args.cache_dir) if args.cache_dir else cache.default_cache_dir()


# ------------------------------------------------------------ commands


def cmd_verify_identities(args) -> tuple[dict, bool]:
    reps = index.rootsum_table(args.mmax, args.tol)
    rows = [{"m": r.m, "k": r.k, "direct": r.direct.real, "closed": r.closed, "difference": r.difference,
             "first_difference": r.first_difference, "second_difference": r.second_difference,
             "bernoulli_form_exact": r.bernoulli_form == r.closed, "pass": r.passes} for r in reps]
    ok = all(r.passes for r in reps)
    return {"command": "verify-identities", "inputs": {"mmax": args.mmax, "tol": args.tol},
            "count": len(rows), "max_difference": max(r.difference for r in reps),
            "pass": ok, "rows": rows}, ok


def _chern_dict(c: index.ChernCoefficients) -> dict:
    return {"k": c.k, "wp": c.wp, "cusp": float(c.cusp), "ell": c.ell,
            "exact": {"wp_times_pi2": c.wp_over_pi2, "cusp": c.cusp,
                      "ell_times_pi": list(c.ell_over_pi)},
            "surviving_terms": sorted(c.surviving_terms())}


def cmd_chern(args) -> tuple[dict, bool]:
    sig = _signature(args.sig)
    c = index.chern_coefficients(sig, args.k)
    dual = index.chern_coefficients(sig, 1 - args.k)
    ok = c.exact_key() == dual.exact_key()
    rep = {"command": "chern", "inputs": {"sig": str(sig), "k": args.k}}
    rep.update(_chern_dict(c))
    rep["duality_with_1_minus_k"] = ok
    rep["pass"] = ok
    return rep, ok


def cmd_dims(args) -> tuple[dict, bool]:
    sig = _signature(args.sig)
    rows = [{"k": k, "dim": index.dim_omega_k(sig, k)} for k in range(args.kmin, args.kmax + 1)]
    expected = index.moduli_dimension(sig)
    ok = index.dim_omega_k(sig, 2) == expected
    return {"command": "dims", "inputs": {"sig": str(sig), "kmin": args.kmin, "kmax": args.kmax},
            "dim_k2": index.dim_omega_k(sig, 2), "moduli_dimension": expected, "pass": ok,
            "rows": rows}, ok


def cmd_area(args) -> tuple[dict, bool]:
    sig = _signature(args.sig)
    return {"command": "area", "inputs": {"sig": str(sig)}, "area": index.area(sig),
            "area_over_2pi": index.area_over_2pi(sig)}, True


def cmd_spectrum(args) -> tuple[dict, bool]:
    g = _group(args.group)
    lengths = spectra.length_spectrum(g, args.nmax, args.convention, args.method, args.word_cap,
                                   _cache_dir(args))
    return {"command": "spectrum", "inputs": {"group": g.name, "nmax": args.nmax,
                                              "convention": args.convention, "method": args.method},
            "entries": len(lengths), "classes": lengths.class_count, "rows": lengths.to_rows()}, True


def cmd_zeta(args) -> tuple[dict, bool]:
    g = _group(args.group)
    lengths = spectra.length_spectrum(g, args.nmax, args.convention, args.method, args.word_cap,
                                   _cache_dir(args))
    res = spectra.selberg_zeta_truncated(lengths, args.s, args.imax, args.chi)
    rep = {"command": "zeta", "inputs": {"group": g.name, "s": args.s, "nmax": args.nmax,
                                         "imax": args.imax, "chi": args.chi, "convention": args.convention}}
    rep.update(_result(res))
    return rep, True


def cmd_factorization(args) -> tuple[dict, bool]:
    group = builtin("builtin:orbifold-0-1-222")
    sub = group.subgroup
    r = spectra.factorization_check(sub, group, args.s, args.nmax, args.imax, args.convention,
                                    _cache_dir(args))
    return {"command": "factorization",
            "inputs": {"s": args.s, "nmax": args.nmax, "imax": args.imax, "convention": args.convention},
            "lhs": r.lhs, "rhs": r.rhs, "discrepancy": r.discrepancy, "tails": r.tails,
            "max_tail": r.max_tail, "control_discrepancy": r.control_discrepancy,
            "pass": r.passes}, r.passes


def cmd_eisenstein(args) -> tuple[dict, bool]:
    g = _group(args.group)
    z = _point(args.z)
    res = kernels.eisenstein(g, z, args.s, args.L, args.method)
    rep = {"command": "eisenstein", "inputs": {"group": g.name, "z": z, "s": args.s, "L": res.meta["L"],
                                               "method": res.meta["method"]},
           "value": res.value, "tail": res.tail, "terms": res.terms}
    ok = True
    if args.fd_h is not None:
        resid = kernels.eisenstein_fd_residual(g, z, args.s, args.fd_h, args.L, args.method)
        ok = resid < args.tol
        rep.update({"fd_h": args.fd_h, "fd_residual": resid, "tol": args.tol, "pass": ok})
    return rep, ok


def cmd_green(args) -> tuple[dict, bool]:
    g = _group(args.group)
    z, zp = _point(args.z), _point(args.zp)
    res = kernels.green_function(g, z, zp, args.L, args.method)
    rep = {"command": "green", "inputs": {"group": g.name, "z": z, "zp": zp, "L": res.meta["L"],
                                          "method": res.meta["method"]},
           "value": res.value, "tail": res.tail, "terms": res.terms,
           "min_distance": res.meta["min_distance"]}
    ok = True
    if args.fd_h is not None:
        resid = kernels.green_fd_residual(g, z, zp, args.fd_h, args.L, args.method)
        ok = resid < args.tol
        rep.update({"fd_h": args.fd_h, "fd_residual": resid, "tol": args.tol, "pass": ok})
    return rep, ok


def cmd_fay(args) -> tuple[dict, bool]:
    g = _group(args.group)
    zp = _point(args.zp)
    ys = _float_list(args.Ylist)
    rows = []
    for y in ys:
        r = kernels.fay_ratio(g, zp, y, args.L, args.method)
        rows.append({"Y": y, "ratio": r.ratio, "deviation": r.deviation, "green": r.green.value,
                     "green_tail": r.green.tail, "eisenstein": r.eis.value, "eisenstein_tail": r.eis.tail})
    devs = [r["deviation"] for r in rows]
    monotone = all(b <= a for a, b in zip(devs, devs[1:]))
    ok = monotone and devs[-1] < args.tol
    return {"command": "fay", "inputs": {"group": g.name, "zp_cusp_frame": zp, "Ylist": ys,
                                         "L": args.L, "method": args.method},
            "monotone": monotone, "final_deviation": devs[-1], "tol": args.tol, "pass": ok,
            "rows": rows}, ok


def cmd_limit_tm(args) -> tuple[dict, bool]:
    rows = []
    ok = True
    for m in _int_list(args.mlist):
        t = kernels.tm_family(m)
        power = t ** m
        order_err = max(abs(float(x) - y) for x, y in zip(power.entries(), (1, 0, 0, 1)))
        zeta = 1j * m / (2 * math.pi)
        if classify(t) is Kind.ELLIPTIC:
            fp_err = abs(fixpoint_elliptic(t).z - zeta)
        else:
            # T_2 is the identity of PSL(2, R); every point is fixed
            fp_err = abs(act(t, zeta) - zeta)
        dist = max(abs(float(x) - y) for x, y in zip(t.entries(), (1, 1, 0, 1)))
        row_ok = order_err < 1e-10 and fp_err < 1e-12 and dist < 10 / m
        ok &= row_ok
        order = elliptic_order(t) if classify(t) is Kind.ELLIPTIC else 1
        rows.append({"m": m, "psl_order": order, "a": float(t.a), "b": float(t.b), "c": float(t.c), "d": float(t.d),
                     "power_m_error": order_err, "fixpoint_error": fp_err,
                     "distance_to_translation": dist, "bound": 10 / m, "pass": row_ok})
    return {"command": "limit-tm", "inputs": {"mlist": args.mlist}, "pass": ok, "rows": rows}, ok


def cmd_ode_check(args) -> tuple[dict, bool]:
    rng = np.random.default_rng(args.seed)
    data = localode.LocalBeltramiData.random(args.m, args.J, rng, args.scale)
    sol = localode.mode_series_solve(data, args.n, args.c0)
    cc = localode.mode_ode_crosscheck(sol, args.r0, args.r1, args.points)
    ok = cc.max_deviation < args.tol
    rep = {"command": "ode-check",
           "inputs": {"m": args.m, "n": args.n, "J": args.J, "c0": args.c0, "seed": args.seed,
                      "scale": args.scale, "r0": args.r0, "r1": args.r1},
           "leading_exponent": sol.leading_exponent, "ode_max_deviation": cc.max_deviation}
    if args.n == 0:
        expected = localode.expected_c2(data, args.c0)
        rep.update({"c0": sol.c0, "c2": sol.c2, "c2_expected": expected,
                    "c2_error": abs(sol.c2 - expected)})
        ok &= abs(sol.c2 - expected) <= 1e-12 * max(1.0, abs(expected))
    else:
        ok &= sol.leading_exponent == abs(args.n)
    rep["pass"] = bool(ok)
    rep["rows"] = [{"r": r, "f_re": s.real, "f_im": s.imag, "ode_re": o.real, "ode_im": o.imag}
                   for r, s, o in zip(cc.grid, cc.series, cc.integrated)]
    return rep, bool(ok)


def cmd_export_group(args) -> tuple[str, bool]:
    return export_group_text(_group(args.group)), True


# -------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbizeta", description="Fuchsian group spectra, zeta products, kernels and index arithmetic.")
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", default=None,
                        help=f"enumeration cache directory (default: ${cache.ENV_VAR})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def group_opts(sp):
        sp.add_argument("--group", default="builtin:orbifold-0-1-222",
                        help="builtin:punctured-torus, builtin:orbifold-0-1-222, or a group file")

    def spectrum_opts(sp):
        group_opts(sp)
        sp.add_argument("--nmax", type=float, required=True)
        sp.add_argument("--convention", choices=NORM_CONVENTIONS, default="trace")
        sp.add_argument("--method", choices=("auto", "modular", "words"), default="auto")
        sp.add_argument("--word-cap", type=int, default=None)

    def kernel_opts(sp):
        group_opts(sp)
        sp.add_argument("--L", type=int, default=None, help="truncation level")
        sp.add_argument("--method", choices=("auto", "modular", "words"), default="auto")

    sp = add("verify-identities", cmd_verify_identities, "root-of-unity identity table")
    sp.add_argument("--mmax", type=int, default=50)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("chern", cmd_chern, "Chern-form coefficients")
    sp.add_argument("--sig", required=True, help="g,n,m1,m2,...")
    sp.add_argument("--k", type=int, required=True)

    sp = add("dims", cmd_dims, "cusp form dimensions")
    sp.add_argument("--sig", required=True)
    sp.add_argument("--kmin", type=int, default=-1)
    sp.add_argument("--kmax", type=int, default=6)

    sp = add("area", cmd_area, "hyperbolic area")
    sp.add_argument("--sig", required=True)

    sp = add("spectrum", cmd_spectrum, "primitive length spectrum")
    spectrum_opts(sp)

    sp = add("zeta", cmd_zeta, "truncated Selberg zeta product")
    spectrum_opts(sp)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--imax", type=int, default=spectra.DEFAULT_I_MAX)
    sp.add_argument("--chi", choices=("trivial", "sign"), default="trivial")

    sp = add("factorization", cmd_factorization, "zeta factorization over the index-two pair")
    sp.add_argument("--s", type=float, default=3.0)
    sp.add_argument("--nmax", type=float, default=400.0)
    sp.add_argument("--imax", type=int, default=spectra.DEFAULT_I_MAX)
    sp.add_argument("--convention", choices=NORM_CONVENTIONS, default="trace")

    sp = add("eisenstein", cmd_eisenstein, "Eisenstein series")
    kernel_opts(sp)
    sp.add_argument("--z", required=True)
    sp.add_argument("--s", type=float, default=2.0)
    sp.add_argument("--fd-h", type=float, default=None, help="also run the finite-difference check")
    sp.add_argument("--tol", type=float, default=1e-4)

    sp = add("green", cmd_green, "automorphic Green's function at s = 2")
    kernel_opts(sp)
    sp.add_argument("--z", required=True)
    sp.add_argument("--zp", required=True)
    sp.add_argument("--fd-h", type=float, default=None, help="also run the finite-difference check")
    sp.add_argument("--tol", type=float, default=1e-3)

    sp = add("fay", cmd_fay, "cusp asymptotics ratio of the Green's function")
    kernel_opts(sp)
    sp.add_argument("--zp", required=True, help="z' in the width-one cusp frame")
    sp.add_argument("--Ylist", default="6,9,12")
    sp.add_argument("--tol", type=float, default=0.05)

    sp = add("limit-tm", cmd_limit_tm, "elliptic family T_m and its limit")
    sp.add_argument("--mlist", default="2-200", help="comma list, ranges like 2-200 allowed")

    sp = add("ode-check", cmd_ode_check, "local mode equation: series vs integrator")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--J", type=int, default=4)
    sp.add_argument("--c0", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--r0", type=float, default=0.01)
    sp.add_argument("--r1", type=float, default=0.5)
    sp.add_argument("--points", type=int, default=25)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("export-group", cmd_export_group, "write a group in the group-file format")
    group_opts(sp)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, ok = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, WordCapExceeded, GroupFileError, OSError) as exc:
        print(f"orbizeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(report, str):
        out.write(report)
    else:
        _emit(report, args.output, out)
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
