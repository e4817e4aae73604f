"""Command-line front end: ``bicheb <command> [options]``.

Exit codes: 0 success (certified), 1 certification failed, 2 argument
error, 3 evaluation error, 4 variation not finite or not converged.

Functions are given either as ``--fn NAME`` (see ``corpus-list``) or as
``--expr TEXT`` in this grammar::

    expr  = term { ("+" | "-") term } ;
    term  = unary { ("*" | "/") unary } ;
    unary = "-" unary | power ;
    power = atom { "^" [ "-" ] integer } ;
    atom  = number | "x" | "y" | "pi" | ("abs"|"sin"|"cos"|"exp") "(" expr ")" | "(" expr ")" ;

Expressions get finite-difference partials (total order <= 4).  The default
step is 1e-4 up to total order 2 and wider above that, where roundoff
would otherwise dominate; ``--fd-h`` fixes it for every order.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .aliasing import (
    alias_residual_matrix,
    choose_k_max,
    extended_degree,
    predicted_tail_bound,
)
from .bounds import (
    SmoothnessClass,
    VariationBundle,
    audit_decay,
    l1_bound_exact_partial,
    l1_bound_quadrature_partial,
)
from .compression import compression_report, report_json, threshold_by_bound, threshold_by_magnitude
from .core import (
    ChebGrid,
    EvaluationError,
    compute_coeffs_quadrature,
    dumps_json,
    exact_coeffs_oracle,
    format_float,
    l1_error,
)
from .corpus import CorpusEntry, SingularPartialError, builtin_corpus, get_entry
from .expr import ParseError, ast_to_function, parse_expression
from .variation import (
    FD_MAX_ORDER,
    VariationNotConverged,
    estimate_variation,
    finite_difference_partial,
    variation_bundle,
)

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_EVAL, EXIT_VARIATION = 0, 1, 2, 3, 4
SCHEMA = 1
ALIAS_DEGREE_WARNING = 512


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_ARGS):
        super().__init__(message)
        self.code = code


# -- function resolution -------------------------------------------------------


def resolve_function(args) -> CorpusEntry:
    if bool(args.fn) == bool(args.expr):
        raise CliError("give exactly one of --fn or --expr")
    if args.fn:
        try:
            return get_entry(args.fn)
        except KeyError as exc:
            raise CliError(str(exc.args[0])) from None
    try:
        ast = parse_expression(args.expr)
    except ParseError as exc:
        raise CliError(f"cannot parse --expr: {exc}") from None
    f = ast_to_function(ast)
    return CorpusEntry(args.expr, f, SmoothnessClass(0, 0), notes="user expression")


def partial_spec(entry: CorpusEntry, ox: int, oy: int, h: float):
    try:
        return entry.partial(ox, oy)
    except KeyError:
        pass
    if ox + oy > FD_MAX_ORDER:
        raise CliError(
            f"{entry.name}: partial of order ({ox}, {oy}) needs finite differences beyond total order "
            f"{FD_MAX_ORDER}; use a built-in corpus entry with analytic partials"
        )
    return finite_difference_partial(entry.f, ox, oy, h)


def get_bundle(entry: CorpusEntry, cls: SmoothnessClass, args) -> VariationBundle:
    known = entry.variations_for(cls)
    if known is not None:
        return known
    return variation_bundle(lambda ox, oy: partial_spec(entry, ox, oy, args.fd_h), cls, args.n_var)


def smoothness(args, need_positive: bool = False) -> SmoothnessClass:
    if args.k is None or args.l is None:
        raise CliError("--k and --l are required")
    if args.k < 0 or args.l < 0:
        raise CliError("--k and --l must be nonnegative")
    if need_positive and (args.k < 1 or args.l < 1):
        raise CliError("this command needs --k >= 1 and --l >= 1")
    return SmoothnessClass(args.k, args.l)


# -- output helpers ------------------------------------------------------------


def emit(args, primary: str, sidecar: str | None = None, sidecar_suffix: str = ".json"):
    """Write ``primary`` to ``--out`` (or stdout) and ``sidecar`` next to it."""
    if not args.out:
        sys.stdout.write(primary)
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(primary, encoding="utf-8", newline="\n")
    if sidecar is not None:
        side = out.with_suffix(sidecar_suffix)
        if side == out:
            side = out.with_name(out.name + ".meta" + sidecar_suffix)
        side.write_text(sidecar, encoding="utf-8", newline="\n")


def say(args, msg: str):
    if not args.quiet:
        print(msg, file=sys.stderr)


def function_id(entry: CorpusEntry, args) -> dict:
    return {"fn": args.fn, "expr": args.expr} if args.expr else {"fn": entry.name}


# -- commands ------------------------------------------------------------------


def cmd_approx(args) -> int:
    entry = resolve_function(args)
    if args.dx >= args.nx or args.dy >= args.ny:
        raise CliError(f"need dx < nx and dy < ny (got dx={args.dx}, nx={args.nx}, dy={args.dy}, ny={args.ny})")
    C = compute_coeffs_quadrature(entry.f, ChebGrid(args.nx, args.ny), args.dx, args.dy)
    meta = {"schema": SCHEMA, "function": function_id(entry, args), **C.to_dict()}
    if args.format == "json":
        emit(args, dumps_json(meta))
    else:
        emit(args, C.to_csv(), dumps_json(meta))
    say(args, f"approx: {entry.name} degree ({args.dx}, {args.dy}) on {args.nx}x{args.ny} nodes, c00 = {C.entries[0, 0]:.12g}")
    return EXIT_OK


def cmd_decay_audit(args) -> int:
    entry = resolve_function(args)
    cls = smoothness(args)
    t0 = time.perf_counter()
    bundle = get_bundle(entry, cls, args)
    t1 = time.perf_counter()
    C = exact_coeffs_oracle(entry.f, args.imax, args.jmax, args.oversample)
    report = audit_decay(C, cls, bundle, tol=args.tol)
    t2 = time.perf_counter()
    l1 = {"d_x": args.imax, "d_y": args.jmax, "err_exact": l1_error(entry.f, C, args.m), "bound_c1": None}
    if cls.k >= 1 and cls.l >= 1 and args.imax >= cls.k and args.jmax >= cls.l:
        l1["bound_c1"] = l1_bound_exact_partial(cls, bundle.v_kl, args.imax, args.jmax)
    doc = {
        "schema": SCHEMA,
        "function": function_id(entry, args),
        "grid": {"i_max": args.imax, "j_max": args.jmax, "oversample": args.oversample, "n_oracle": C.provenance["n"]},
        "bound_report": report.to_dict(),
        "l1": l1,
        "ok": report.ok,
    }
    if args.timings:
        doc["timings"] = {"variation_s": t1 - t0, "audit_s": t2 - t1}
    emit(args, dumps_json(doc), report.grid_csv(), ".csv")
    say(args, f"decay-audit: {entry.name} (k, l) = ({cls.k}, {cls.l}): {len(report.violations)} violations, "
              f"max ratio {report.max_ratio:.4g} at {report.argmax}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _tail_certificate(entry: CorpusEntry, args):
    if args.k is not None and args.l is not None:
        cls = smoothness(args)
        return cls, get_bundle(entry, cls, args)
    if entry.tail_certificate is not None:
        return entry.tail_certificate
    if entry.analytic_variations is not None and entry.cls.k >= 1 and entry.cls.l >= 1:
        return entry.cls, entry.analytic_variations
    return None


def cmd_alias_check(args) -> int:
    entry = resolve_function(args)
    nx, ny, dx, dy = args.nx, args.ny, args.dx, args.dy
    if dx >= nx or dy >= ny:
        raise CliError(f"need dx < nx and dy < ny (got dx={dx}, nx={nx}, dy={dy}, ny={ny})")
    cert = _tail_certificate(entry, args)
    k_max = args.kmax
    if k_max is None:
        k_max = choose_k_max(*cert, nx, ny, dx, dy) if cert else 4
    if k_max < 1:
        raise CliError("--kmax must be at least 1")
    ext = max(extended_degree(nx, dx, k_max), extended_degree(ny, dy, k_max))
    if ext > ALIAS_DEGREE_WARNING:
        print(f"warning: extended oracle degree {ext} exceeds {ALIAS_DEGREE_WARNING}; this may be slow",
              file=sys.stderr)
    R = alias_residual_matrix(entry.f, dx, dy, nx, ny, k_max, args.oversample)

    T = None
    basis = None
    p = entry.poly_degree
    if p is not None and p[0] < 2 * (k_max + 1) * nx - dx and p[1] < 2 * (k_max + 1) * ny - dy:
        T = np.zeros_like(R)
        basis = "polynomial degree"
    elif cert is not None:
        cls, bundle = cert
        T = np.array([[predicted_tail_bound(cls, bundle, i, j, nx, ny, k_max) for j in range(dy + 1)]
                      for i in range(dx + 1)])
        basis = f"decay bounds (k, l) = ({cls.k}, {cls.l}), {bundle.source}"
    limit = (T if T is not None else np.zeros_like(R)) + args.atol
    ok = bool(np.all(R <= limit))
    a, b = np.unravel_index(np.argmax(R), R.shape)
    doc = {
        "schema": SCHEMA,
        "function": function_id(entry, args),
        "n_x": nx, "n_y": ny, "d_x": dx, "d_y": dy, "k_max": k_max,
        "max_residual": float(R.max()),
        "argmax": [int(a), int(b)],
        "predicted_tail_bound": float(T.max()) if T is not None else None,
        "tail_bound_basis": basis,
        "atol": args.atol,
        "ok": ok,
    }
    emit(args, dumps_json(doc))
    say(args, f"alias-check: {entry.name} residual {R.max():.3e}, tail bound "
              f"{'n/a' if T is None else format(T.max(), '.3e')}, {'ok' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_FAIL


def parse_n_rule(rule: str):
    """``"A*d+B"`` style node rule (``"2d+2"``, ``"3*d"``, ``"d+10"``)."""
    m = re.fullmatch(r"\s*(\d*)\s*\*?\s*d\s*(?:\+\s*(\d+))?\s*", rule)
    if not m:
        raise CliError(f"cannot parse --n-rule {rule!r}; expected a form like '2d+2'")
    a = int(m.group(1)) if m.group(1) else 1
    b = int(m.group(2)) if m.group(2) else 0
    return lambda d: a * d + b


def _loglog_slope(d, v) -> float | None:
    d, v = np.asarray(d, float), np.asarray(v, float)
    good = (v > 0) & np.isfinite(v)
    if good.sum() < 2:
        return None
    return float(np.polyfit(np.log(d[good]), np.log(v[good]), 1)[0])


def cmd_error_report(args) -> int:
    entry = resolve_function(args)
    cls = smoothness(args, need_positive=True)
    if args.dmin < max(cls.k, cls.l):
        raise CliError(f"--dmin must be at least max(k, l) = {max(cls.k, cls.l)}")
    if args.dmax < args.dmin or args.step < 1:
        raise CliError("need dmax >= dmin and step >= 1")
    rule = parse_n_rule(args.n_rule)
    bundle = get_bundle(entry, cls, args)
    rows = []
    for d in range(args.dmin, args.dmax + 1, args.step):
        n = rule(d)
        if not (d < n and n - 1 >= max(cls.k, cls.l)):
            raise CliError(f"node rule gives n = {n} for d = {d}; need d < n")
        C = exact_coeffs_oracle(entry.f, d, d, args.oversample)
        Cq = compute_coeffs_quadrature(entry.f, ChebGrid(n, n), d, d)
        rows.append({
            "d": d, "n": n,
            "err_exact": l1_error(entry.f, C, args.m),
            "bound_c1": l1_bound_exact_partial(cls, bundle.v_kl, d, d),
            "err_quad": l1_error(entry.f, Cq, args.m),
            "bound_c2": l1_bound_quadrature_partial(cls, bundle, d, d, n, n),
        })
    ok = all(r["err_exact"] <= r["bound_c1"] and r["err_quad"] <= r["bound_c2"] for r in rows)
    lines = ["d,err_exact,bound_c1,err_quad,bound_c2"]
    for r in rows:
        lines.append(",".join([str(r["d"])] + [format_float(r[c]) for c in ("err_exact", "bound_c1", "err_quad", "bound_c2")]))
    csv_text = "\n".join(lines) + "\n"
    ds = [r["d"] for r in rows]
    doc = {
        "schema": SCHEMA,
        "function": function_id(entry, args),
        "class": {"k": cls.k, "l": cls.l},
        "variations": bundle.to_dict(),
        "n_rule": args.n_rule,
        "rows": rows,
        "slopes": {
            "err_exact": _loglog_slope(ds, [r["err_exact"] for r in rows]),
            "bound_c1": _loglog_slope(ds, [r["bound_c1"] for r in rows]),
            "err_quad": _loglog_slope(ds, [r["err_quad"] for r in rows]),
        },
        "ok": ok,
    }
    if args.format == "json":
        emit(args, dumps_json(doc))
    else:
        emit(args, csv_text, dumps_json(doc))
    say(args, f"error-report: {entry.name} {len(rows)} degrees, {'all within bounds' if ok else 'BOUND EXCEEDED'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compress(args) -> int:
    entry = resolve_function(args)
    if not args.epsilon > 0:
        raise CliError("--epsilon must be positive")
    C = exact_coeffs_oracle(entry.f, args.dx, args.dy, args.oversample)
    if args.strategy == "bound":
        cls = smoothness(args)
        S = threshold_by_bound(C, cls, get_bundle(entry, cls, args), args.epsilon)
    else:
        S = threshold_by_magnitude(C, args.epsilon)
    rep = compression_report(S, entry.f, args.m)
    emit(args, S.to_csv(), report_json(S, rep))
    say(args, f"compress: kept {rep['kept_count']}/{rep['total_count']}, budget {rep['budget']:.4g}, "
              f"measured {rep['measured_l1_vs_dense']:.4g}")
    return EXIT_OK if rep["sound"] else EXIT_FAIL


def cmd_corpus_list(args) -> int:
    emit(args, dumps_json({"schema": SCHEMA, "entries": [e.metadata() for e in builtin_corpus()]}))
    return EXIT_OK


def cmd_variation(args) -> int:
    entry = resolve_function(args)
    cls = smoothness(args)
    k, l = cls.k, cls.l
    ests = {}
    for key, (ox, oy) in (("v_kl", (k + 1, l + 1)), ("v_k", (k + 1, 0)), ("v_l", (0, l + 1))):
        ests[key] = estimate_variation(partial_spec(entry, ox, oy, args.fd_h), args.n_var)
    converged = all(e.converged for e in ests.values())
    doc = {key: e.value for key, e in ests.items()}
    doc.update({"n_used": args.n_var, "converged": converged,
                "relative_change_on_doubling": {key: e.relative_change for key, e in ests.items()}})
    emit(args, dumps_json(doc))
    return EXIT_OK if converged else EXIT_VARIATION


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; numpy handles threading")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical output)")

    fn = argparse.ArgumentParser(add_help=False)
    fn.add_argument("--fn", help="built-in corpus entry")
    fn.add_argument("--expr", help="expression in x and y")
    fn.add_argument("--fd-h", type=float, default=None,
                    help="finite-difference step for expressions (default 1e-4, widened for orders 3 and 4)")
    fn.add_argument("--n-var", type=int, default=256, help="variation quadrature nodes per axis")

    kl = argparse.ArgumentParser(add_help=False)
    kl.add_argument("--k", type=int)
    kl.add_argument("--l", type=int)

    p = argparse.ArgumentParser(prog="bicheb", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("approx", parents=[common, fn], help="quadrature coefficients to CSV/JSON")
    s.add_argument("--dx", type=int, required=True)
    s.add_argument("--dy", type=int, required=True)
    s.add_argument("--nx", type=int, required=True)
    s.add_argument("--ny", type=int, required=True)
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("decay-audit", parents=[common, fn, kl], help="check oracle coefficients against decay bounds")
    s.add_argument("--imax", type=int, default=64)
    s.add_argument("--jmax", type=int, default=64)
    s.add_argument("--oversample", "--n-oracle", type=int, default=4)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--m", type=int, default=256, help="Gauss-Legendre points per axis for L1 errors")
    s.set_defaults(func=cmd_decay_audit)

    s = sub.add_parser("alias-check", parents=[common, fn, kl], help="verify the aliasing identity")
    s.add_argument("--nx", type=int, required=True)
    s.add_argument("--ny", type=int, required=True)
    s.add_argument("--dx", type=int, required=True)
    s.add_argument("--dy", type=int, required=True)
    s.add_argument("--kmax", type=int)
    s.add_argument("--oversample", type=int, default=4)
    s.add_argument("--atol", type=float, default=1e-10)
    s.set_defaults(func=cmd_alias_check)

    s = sub.add_parser("error-report", parents=[common, fn, kl], help="measured L1 errors against both L1 bounds")
    s.add_argument("--dmin", type=int, required=True)
    s.add_argument("--dmax", type=int, required=True)
    s.add_argument("--step", type=int, default=1)
    s.add_argument("--n-rule", default="2d+2")
    s.add_argument("--oversample", type=int, default=4)
    s.add_argument("--m", type=int, default=256)
    s.set_defaults(func=cmd_error_report)

    s = sub.add_parser("compress", parents=[common, fn, kl], help="threshold coefficients with an L1 budget")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--dx", type=int, required=True)
    s.add_argument("--dy", type=int, required=True)
    s.add_argument("--strategy", choices=("bound", "magnitude"), default="bound")
    s.add_argument("--oversample", type=int, default=4)
    s.add_argument("--m", type=int, default=256)
    s.set_defaults(func=cmd_compress)

    s = sub.add_parser("corpus-list", parents=[common], help="list built-in functions as JSON")
    s.set_defaults(func=cmd_corpus_list)

    s = sub.add_parser("variation", parents=[common, fn, kl], help="weighted variations V_kl, V_k, V_l")
    s.set_defaults(func=cmd_variation)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (VariationNotConverged, SingularPartialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VARIATION
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
