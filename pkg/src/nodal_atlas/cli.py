"""Command-line interface: `nodal-atlas <command> ...`.

Each command prints a key=value RunSummary on stdout. Exit status is 0 on
success, 2 when a reported check fails and 1 on errors (including usage
errors). Wall time goes to stderr so that stdout is reproducible.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import coeffs as co
from .errors import NodalAtlasError
from .fileio import RunSummary, fmt, input_digest, load_form, write_coefficients, write_csv, write_pgm
from .parallel import worker_count


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _form(args):
    form = load_form(args.form)
    return form, {"form": input_digest(args.form), "t": form.t, "parity": form.parity}


def _window(args):
    from .windows import BumpWindow

    return BumpWindow(args.a, args.b, args.smoothness)


def _join(vals):
    return ";".join(fmt(v) for v in vals)


# ---------------------------------------------------------------- commands
def cmd_eval(args):
    from .waveform import eval_automorphic, eval_direct, truncation_error_bound

    form, inputs = _form(args)
    fn = eval_automorphic if args.automorphic else eval_direct
    val = float(fn(form, args.x, args.y))
    s = RunSummary("eval", inputs, {"x": args.x, "y": args.y, "automorphic": args.automorphic})
    s.results["phi"] = val
    if not args.automorphic:
        s.results["est_error"] = truncation_error_bound(form, args.y)
    return s


def cmd_sign_changes(args):
    from .restriction import sign_changes_on_delta, sign_changes_on_horocycle

    form, inputs = _form(args)
    if args.horocycle is not None:
        cl = sign_changes_on_horocycle(form, args.horocycle, args.spw)
        params = {"horocycle": args.horocycle, "spw": args.spw}
    else:
        cl = sign_changes_on_delta(form, args.delta, tuple(args.range) if args.range else None, args.spw)
        params = {"delta": args.delta, "spw": args.spw}
    s = RunSummary("sign-changes", inputs, params)
    s.results["sign_changes"] = cl.sign_changes_total
    s.results["zeros"] = cl.zeros_total
    s.results["locations"] = _join(cl.params)
    if cl.warning:
        s.results["warning"] = cl.warning
    s.checks.append(("n_le_m", cl.sign_changes_total <= cl.zeros_total, ""))
    if args.csv:
        write_csv(args.csv, ["location", "refined", "residual", "tangential"],
                  [(c.location, int(c.refined), c.residual, int(c.tangential)) for c in cl.crossings])
    return s


def cmd_restrict(args):
    from .restriction import (restriction_norm_geodesic, restriction_norm_horocycle,
                              restriction_norm_horocycle_parseval)

    form, inputs = _form(args)
    if args.horocycle is not None:
        s = RunSummary("restrict", inputs, {"horocycle": args.horocycle})
        q = restriction_norm_horocycle(form, args.horocycle)
        p = restriction_norm_horocycle_parseval(form, args.horocycle)
        s.results.update({"norm": q, "norm_parseval": p})
        s.checks.append(("parseval", abs(q - p) <= 1e-8 * max(abs(p), 1e-300), f"diff={fmt(abs(q - p))}"))
    else:
        s = RunSummary("restrict", inputs, {"geodesic": args.branch, "a": args.a, "b": args.b,
                                            "smoothness": args.smoothness})
        s.results["norm"] = restriction_norm_geodesic(form, _window(args), args.branch)
    return s


def cmd_nodal(args):
    from .nodal import (bs_prediction, components, courant_bound, delta_zero_census, sign_grid,
                        theorem21_check)

    form, inputs = _form(args)
    grid = sign_grid(form, args.ymin, args.ymax, args.res)
    d = components(grid)
    s = RunSummary("nodal count", inputs, {"ymin": args.ymin, "ymax": args.ymax, "res": args.res})
    s.results.update({"N": d.N, "R": d.R, "S_split": d.S_split, "grid_cells": int(grid.signs.size),
                      "grid_digest": grid.digest(), "courant": courant_bound(form.t),
                      "bs_prediction": bs_prediction(form.t)})
    s.checks.append(("partition", d.consistent, "; ".join(d.anomalies[:3])))
    if form.parity == "even":
        census = delta_zero_census(form)
        rep = theorem21_check(d, census)
        s.results.update({"m": census.m, "n": census.n})
        s.checks.append(("theorem21", rep.ok, f"lower={fmt(rep.lower)} R={rep.R} m={rep.m}"))
    if args.pgm:
        write_pgm(args.pgm, d.labels)
    if args.csv:
        write_csv(args.csv, ["label", "sign", "cells", "area", "y_min", "y_max", "inert"],
                  [(c.label, c.sign, c.cells, c.area, c.y_min, c.y_max, int(c.touches_delta))
                   for c in d.components])
    return s


def cmd_rw(args):
    from .randomwave import expected_zero_count

    p = expected_zero_count(args.r, args.Y)
    s = RunSummary("rw predict", {}, {"r": args.r, "Y": args.Y})
    s.results.update({"expected_count": p.expected_count, "leading_term": p.leading_term,
                      "asymptotic_regime": p.asymptotic_regime})
    for i, f in enumerate(p.flags):
        s.results[f"flag{i}"] = f
    if args.csv:
        write_csv(args.csv, ["x", "density"], p.samples)
    return s


def cmd_que(args):
    form, inputs = _form(args)
    data = form.coeffs
    s = RunSummary(f"que {args.kind}", inputs)
    if args.kind == "shortsum":
        for w in args.omega:
            s.results[f"shortsum_{fmt(w)}"] = co.shortsum(data, w)
            s.results[f"ratio_{fmt(w)}"] = co.shortsum(data, w) / (w * form.t)
        for a, q in ((1, 3), (1, 4), (3, 8)):
            s.results[f"twisted_{a}_{q}"] = co.twisted_shortsum(data, a, q, args.omega[0])
    elif args.kind == "aa2":
        h = _window(args)
        s.parameters.update({"m": args.m, "a": args.a, "b": args.b})
        s.results["sum"] = co.aa2_sum(data, args.m, h)
        s.results["target"] = co.aa2_target(args.m, h)
    elif args.kind == "poincare":
        from .restriction import poincare_functional

        s.parameters.update({"h": args.h, "a": args.a, "b": args.b, "smoothness": args.smoothness})
        s.results["value"] = poincare_functional(form, args.h, _window(args))
    else:
        from .restriction import cusp_mass

        s.parameters["Y"] = args.Y
        mass, target = cusp_mass(form, args.Y)
        s.results.update({"mass": mass, "target": target})
    return s


def cmd_mellin(args):
    from .restriction import mellin_check

    form, inputs = _form(args)
    s = RunSummary("mellin-check", inputs, {"sigma": args.sigma, "tol": args.tol})
    for tp in args.tprobe:
        r = mellin_check(form, tp, args.sigma)
        s.results[f"rel_error_{fmt(tp)}"] = r.rel_error
        s.checks.append((f"mellin_{fmt(tp)}", r.rel_error <= args.tol, f"rel={fmt(r.rel_error)}"))
    return s


def cmd_solve(args):
    from .collocation import solve_collocation
    from .waveform import automorphy_residual

    form = solve_collocation(tuple(args.window), args.parity, n_coeffs=args.n_coeffs)
    res = automorphy_residual(form)
    s = RunSummary("solve", {}, {"window": _join(args.window), "parity": args.parity, "n_coeffs": args.n_coeffs})
    s.results.update({"t": form.t, "rho1_scaled": form.rho1, "collocation_residual": form.info["collocation_residual"],
                      "automorphy_residual": res})
    s.checks.append(("automorphy", res <= 1e-5, f"residual={fmt(res)}"))
    if args.out:
        write_coefficients(args.out, form)
    return s


def cmd_verify(args):
    from .verify import run_verify

    loaded = [(path, load_form(path)) for path in args.form or []]
    parities = [f.parity for _, f in loaded]
    forms, inputs = {}, {}
    for i, (path, f) in enumerate(loaded):
        # tag by parity, with the position appended only when parities repeat
        tag = f.parity if parities.count(f.parity) == 1 else f"{f.parity}{i}"
        forms[tag] = f
        inputs[tag] = input_digest(path)
    checks, results = run_verify(args.module, forms)
    return RunSummary(f"verify {args.module}", inputs, {}, results, checks)


# ---------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nodal-atlas", description="Maass form nodal and restriction toolkit")
    p.add_argument("--summary", help="also write the run summary to this file")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_form(sp, required=True):
        sp.add_argument("--form", required=required, help="coefficient file (maassform v1)")
        return sp

    def with_window(sp, a=1.0, b=0.25):
        sp.add_argument("--a", type=float, default=a)
        sp.add_argument("--b", type=float, default=b)
        sp.add_argument("--smoothness", choices=("C2", "smooth"), default="C2")

    e = with_form(sub.add_parser("eval", help="evaluate phi at a point"))
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--y", type=float, required=True)
    e.add_argument("--automorphic", action="store_true", help="pull z back into the fundamental domain first")
    e.set_defaults(func=cmd_eval)

    sc = with_form(sub.add_parser("sign-changes", help="sign changes on a horocycle or delta branch"))
    g = sc.add_mutually_exclusive_group(required=True)
    g.add_argument("--horocycle", type=float, metavar="Y")
    g.add_argument("--delta", choices=("delta1", "delta2", "delta3"))
    sc.add_argument("--range", type=float, nargs=2)
    sc.add_argument("--spw", type=float, default=8.0, help="samples per wavelength")
    sc.add_argument("--csv")
    sc.set_defaults(func=cmd_sign_changes)

    rs = with_form(sub.add_parser("restrict", help="restriction L2 norms"))
    g = rs.add_mutually_exclusive_group(required=True)
    g.add_argument("--horocycle", type=float, metavar="Y")
    g.add_argument("--geodesic", action="store_true")
    rs.add_argument("--branch", choices=("delta1", "delta2"), default="delta1")
    with_window(rs)
    rs.set_defaults(func=cmd_restrict)

    nd = sub.add_parser("nodal", help="nodal domain census")
    nsub = nd.add_subparsers(dest="action", required=True, parser_class=_Parser)
    nc = with_form(nsub.add_parser("count"))
    nc.add_argument("--ymin", type=float, default=0.85)
    nc.add_argument("--ymax", type=float, default=6.0)
    nc.add_argument("--res", type=float, default=8.0)
    nc.add_argument("--pgm")
    nc.add_argument("--csv")
    nc.set_defaults(func=cmd_nodal)

    rw = sub.add_parser("rw", help="random-wave model")
    rsub = rw.add_subparsers(dest="action", required=True, parser_class=_Parser)
    rp = rsub.add_parser("predict")
    rp.add_argument("--r", type=float, required=True)
    rp.add_argument("--Y", type=float, required=True)
    rp.add_argument("--csv")
    rp.set_defaults(func=cmd_rw)

    q = sub.add_parser("que", help="QUE functionals")
    qsub = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    qs = with_form(qsub.add_parser("shortsum"))
    qs.add_argument("--omega", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    qa = with_form(qsub.add_parser("aa2"))
    qa.add_argument("--m", type=int, default=0)
    with_window(qa, 0.5, 0.1)
    qp = with_form(qsub.add_parser("poincare"))
    qp.add_argument("--h", type=int, default=0)
    with_window(qp)
    qc = with_form(qsub.add_parser("cusp-mass"))
    qc.add_argument("--Y", type=float, default=2.0)
    for sp in (qs, qa, qp, qc):
        sp.set_defaults(func=cmd_que)

    mc = with_form(sub.add_parser("mellin-check", help="Mellin transform against the L-series"))
    mc.add_argument("--tprobe", type=float, nargs="+", default=[0.0, 1.0, 2.0, 3.0, 4.0])
    mc.add_argument("--sigma", type=float, default=1.5)
    mc.add_argument("--tol", type=float, default=1e-3)
    mc.set_defaults(func=cmd_mellin)

    so = sub.add_parser("solve", help="compute a form by collocation")
    so.add_argument("--window", type=float, nargs=2, required=True)
    so.add_argument("--parity", choices=("even", "odd"), required=True)
    so.add_argument("--n-coeffs", type=int, default=1000)
    so.add_argument("--out")
    so.set_defaults(func=cmd_solve)

    ve = sub.add_parser("verify", help="run the invariant suite")
    ve.add_argument("module", help="all or a module name")
    ve.add_argument("--form", action="append", help="coefficient file (repeatable)")
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    t0 = time.time()
    try:
        args = build_parser().parse_args(argv)
        summary = args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (NodalAtlasError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary.wall_time = time.time() - t0
    text = summary.text()
    sys.stdout.write(text)
    if args.summary:
        Path(args.summary).write_text(text)
    print(f"wall_time={summary.wall_time:.3f}s threads={worker_count()}", file=sys.stderr)
    return 0 if summary.ok else 2


if __name__ == "__main__":
    sys.exit(main())
