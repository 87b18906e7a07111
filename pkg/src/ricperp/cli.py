"""Command-line interface: ``ricperp {model,cspace,certify,projbundle} ...``.

Exit status: 0 when the verdict is positive (or the command only emits
data), 2 for ``fails`` or ``nonnegative_boundary``, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import certify as cert
from . import cspace, io, models, projbundle
from . import tensor as kt
from .errors import RicPerpError

log = logging.getLogger("ricperp")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _str_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# rendering


def _md_scalar(v):
    if isinstance(v, float):
        return format(v, ".10g")
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}i"
    return str(v)


def _md_table(rows, columns):
    out = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        out.append("| " + " | ".join(_md_scalar(row.get(c, "")) for c in columns) + " |")
    return "\n".join(out) + "\n"


def _report_md(d):
    rows = []
    for k, v in d.items():
        if isinstance(v, dict):
            rows += [
                {"field": f"{k}.{kk}", "value": vv}
                for kk, vv in v.items()
                if not isinstance(vv, (list, np.ndarray))
            ]
        elif not isinstance(v, (list, np.ndarray)):
            rows.append({"field": k, "value": v})
    text = _md_table(rows, ["field", "value"])
    w = d.get("witness")
    if isinstance(w, list):
        text += "\nwitness: " + ", ".join(_md_scalar(complex(c)) for c in w) + "\n"
    return text


def _emit(args, payload, md=None):
    if getattr(args, "format", "json") == "md":
        text = md(payload) if md else _report_md(payload)
    else:
        text = io.dumps(payload)
    out = getattr(args, "output", None)
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _exit_for(verdict):
    return EXIT_OK if verdict == "positive" else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# model


MODEL_BUILDERS = {
    "fubini-study": lambda a: models.fubini_study(a.n),
    "type-i-dual": lambda a: models.type_I_dual(a.p, a.q),
    "type-iii-dual": lambda a: models.type_III_dual(a.r),
    "curve-product": lambda a: models.curve_product(a.k1, a.k2),
    "p1-product": lambda a: _p1_product(),
}


def _p1_product():
    g1, R1 = models.fubini_study(1)
    R, g = kt.product_tensor(R1, g1, R1, g1)
    return g, R


def cmd_model_emit(args):
    need = {"fubini-study": ["n"], "type-i-dual": ["p", "q"], "type-iii-dual": ["r"], "curve-product": ["k1", "k2"]}
    for field in need.get(args.name, []):
        if getattr(args, field) is None:
            raise UsageError(f"model {args.name} needs --{field}")
    g, R = MODEL_BUILDERS[args.name](args)
    text = io.dump_tensor(R, g)
    if args.output:
        io.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# cspace


def _record_md(records):
    rows = []
    for rec in records:
        d = rec.to_dict()
        rows.append(
            {
                "space": rec.descriptor.label,
                "n": d["dimension"],
                "mu": d["mu"],
                "nu": d["nu"],
                "QB": d["qb_verdict"],
                "Ric_perp": d["ricperp_verdict"],
                "reason": d["ricperp_reason"],
            }
        )
    return _md_table(rows, ["space", "n", "mu", "nu", "QB", "Ric_perp", "reason"])


def cmd_cspace_classify(args):
    desc = cspace.CSpaceDescriptor(args.family, args.rank, args.node)
    rec = cspace.classify(desc)
    _emit(args, rec.to_dict(), lambda _: _record_md([rec]))
    return EXIT_OK


def cmd_cspace_table(args):
    recs = cspace.classify_range(args.families, args.max_rank)
    _emit(args, [r.to_dict() for r in recs], lambda _: _record_md(recs))
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


def _opts(args):
    return cert.CertifyOptions(
        restarts=args.restarts, max_iters=args.max_iters, seed=args.seed, grid_oracle=getattr(args, "oracle", False)
    )


def cmd_certify(args):
    g, R = io.load_tensor(args.tensor, args.validation_tol)
    opts = _opts(args)
    kind = args.quantity
    if kind == "ric-perp":
        rep = cert.min_ric_perp(R, g, opts)
    elif kind == "h-max":
        rep = cert.max_holo_sect(R, g, opts)
    elif kind == "qb":
        rep = cert.min_qb(kt.to_orthonormal(R, g), opts)
    elif kind == "nu":
        rep = cert.nu_report(R, g)
    elif kind == "flat":
        fr = cert.flat_ric_perp_classify(R, g, args.tol, opts)
        payload = {
            "quantity": "ric_perp_flat",
            "verdict": fr.verdict,
            "max_abs_ric_perp": fr.max_abs_ric_perp,
            "scalar_curvature": fr.scalar,
            "decomposition_residual": fr.residual,
            "max_abs_R": fr.max_abs_R,
            "method": {"seed": opts.seed, "restarts": opts.restarts},
        }
        _emit(args, payload)
        return EXIT_ERROR if fr.verdict == "inconsistent" else EXIT_OK
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(kind)
    _emit(args, rep.to_dict())
    return _exit_for(rep.verdict)


# ---------------------------------------------------------------------------
# projbundle


def _model(args):
    if args.base_dim is None:
        raise UsageError("--base-dim is required")
    if not args.degrees:
        raise UsageError("--degrees must list at least one integer")
    return models.SplitBundleModel(args.base_dim, tuple(args.degrees))


def cmd_projbundle_check(args):
    model = _model(args)
    _, fs = models.fubini_study(model.n)
    bundle = models.split_bundle_curvature(model)
    res = projbundle.condition_margin(fs, bundle, samples=args.samples, seed=args.seed, model=model)
    verdict = cert.verdict_for(res.closed_form)
    payload = {
        "quantity": "condition_margin",
        "base_dim": model.n,
        "degrees": list(model.degrees),
        "value": float(res.closed_form),
        "sampled_min": res.margin,
        "witness": {"v": res.v, "X": res.X},
        "verdict": verdict,
        "margin": float(res.closed_form),
        "method": {"seed": args.seed, "samples": res.samples},
    }
    if args.lam is not None:
        rep = projbundle.min_lambda_search(model, [args.lam], _opts(args))
        p = rep.points[0]
        payload["lambda"] = {
            "lambda": p.lam,
            "min_ric_perp": p.min_ric_perp,
            "verdict": p.verdict,
            "vertical_min": p.vertical_min,
            "scope": rep.scope,
        }
    _emit(args, payload)
    return _exit_for(verdict)


def cmd_projbundle_lambda_search(args):
    model = _model(args)
    rep = projbundle.min_lambda_search(model, args.grid, _opts(args))
    points = [
        {
            "lambda": p.lam,
            "min_ric_perp": p.min_ric_perp,
            "verdict": p.verdict,
            "vertical_min": p.vertical_min,
            "witness_v": p.witness_v,
            "witness_X": p.witness_X,
            "converged": p.converged,
        }
        for p in rep.points
    ]
    payload = {
        "quantity": "lambda_search",
        "base_dim": model.n,
        "degrees": list(model.degrees),
        "first_positive": rep.first_positive if rep.first_positive is not None else "none in grid",
        "stays_positive": rep.stays_positive,
        "scope": rep.scope,
        "points": points,
        "method": rep.settings,
    }

    def md(_):
        rows = [{k: v for k, v in p.items() if k in ("lambda", "min_ric_perp", "vertical_min", "verdict")} for p in points]
        head = f"first positive lambda: {payload['first_positive']}\n\n"
        return head + _md_table(rows, ["lambda", "min_ric_perp", "vertical_min", "verdict"])

    _emit(args, payload, md)
    return EXIT_OK if rep.first_positive is not None else EXIT_NEGATIVE


def cmd_projbundle_curvature(args):
    inp = io.load_bundle_input(args.input)
    R = projbundle.g_curvature_at_origin(inp)
    text = io.dump_tensor(R)
    if args.output:
        io.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_output(p, fmt=True):
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    if fmt:
        p.add_argument("--format", choices=("json", "md"), default="json", help="report format (default json)")


def _add_certify_opts(p):
    p.add_argument("--restarts", type=int, default=64, help="random restarts (default 64)")
    p.add_argument("--max-iters", type=int, default=500, help="iterations per restart (default 500)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def build_parser():
    parser = _Parser(prog="ricperp", description="Curvature positivity checks for Kähler curvature tensors.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    model = sub.add_parser("model", help="emit model curvature tensors")
    msub = model.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    emit = msub.add_parser("emit", help="write a model tensor file")
    emit.add_argument("name", choices=sorted(MODEL_BUILDERS))
    emit.add_argument("-n", type=int, help="dimension (fubini-study)")
    emit.add_argument("-p", type=int, help="rows (type-i-dual)")
    emit.add_argument("-q", type=int, help="columns (type-i-dual)")
    emit.add_argument("-r", type=int, help="matrix size (type-iii-dual)")
    emit.add_argument("--k1", type=float, help="first curvature (curve-product)")
    emit.add_argument("--k2", type=float, help="second curvature (curve-product)")
    _add_output(emit, fmt=False)
    emit.set_defaults(func=cmd_model_emit)

    cs = sub.add_parser("cspace", help="Kähler C-space catalog")
    csub = cs.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    cl = csub.add_parser("classify", help="classify one (family, rank, node)")
    cl.add_argument("--family", required=True, choices=cspace.FAMILIES)
    cl.add_argument("--rank", type=int, required=True)
    cl.add_argument("--node", type=int, required=True)
    _add_output(cl)
    cl.set_defaults(func=cmd_cspace_classify)
    tb = csub.add_parser("table", help="classify every node up to a rank")
    tb.add_argument("--families", type=_str_list, default=list(cspace.CLASSICAL), help="comma list (default A,B,C,D)")
    tb.add_argument("--max-rank", type=int, default=10, help="largest rank (default 10)")
    _add_output(tb)
    tb.set_defaults(func=cmd_cspace_table)

    ce = sub.add_parser("certify", help="extremize curvature quantities of a tensor file")
    cesub = ce.add_subparsers(dest="quantity", required=True, parser_class=_Parser)
    for name, helptext in (
        ("ric-perp", "minimum of Ric^perp"),
        ("h-max", "maximum holomorphic sectional curvature"),
        ("qb", "heuristic minimum of QB"),
        ("flat", "Ric^perp-flat classification"),
        ("nu", "largest eigenvalue of Q on S^2 T"),
    ):
        p = cesub.add_parser(name, help=helptext)
        p.add_argument("tensor", help="tensor file")
        _add_certify_opts(p)
        p.add_argument("--validation-tol", type=float, default=kt.VALIDATION_TOL, help="symmetry tolerance on load")
        if name in ("ric-perp", "h-max"):
            p.add_argument("--oracle", action="store_true", help="cross-check on a dense grid (n <= 3)")
        if name == "flat":
            p.add_argument("--tol", type=float, default=1e-9, help="flatness tolerance (default 1e-9)")
        _add_output(p)
        p.set_defaults(func=cmd_certify)

    pb = sub.add_parser("projbundle", help="projectivized split bundles over P^n")
    pbsub = pb.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    ck = pbsub.add_parser("check", help="pointwise bundle condition margin")
    ls = pbsub.add_parser("lambda-search", help="certify Ric^perp on a lambda grid")
    for p in (ck, ls):
        p.add_argument("--base-dim", type=int, required=True)
        p.add_argument("--degrees", type=_int_list, required=True, help="comma list, e.g. 0,0,-1")
        _add_certify_opts(p)
        _add_output(p)
    ck.add_argument("--samples", type=int, default=256, help="random (v, X) samples (default 256)")
    ck.add_argument("--lambda", dest="lam", type=float, help="also certify Ric^perp at this lambda")
    ck.set_defaults(func=cmd_projbundle_check)
    ls.add_argument("--grid", type=_float_list, default=[5.0, 10.0, 20.0, 50.0, 100.0])
    ls.set_defaults(func=cmd_projbundle_lambda_search)
    cv = pbsub.add_parser("curvature", help="curvature tensor of G at a point")
    cv.add_argument("--input", required=True, help="bundle point description (json)")
    _add_output(cv, fmt=False)
    cv.set_defaults(func=cmd_projbundle_curvature)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ricperp: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (RicPerpError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"ricperp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())
