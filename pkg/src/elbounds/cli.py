"""
Command-line interface.

Payloads (JSON or CSV) go to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 domain or usage error, 2 numerical failure.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass

from . import bounds, circle, el, geometry, simulation

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2


@dataclass
class CommandOutcome:
    exit_code: int
    payload: str = ""
    diagnostics: str = ""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
        if isinstance(v, dict):
            return {key: clean(val) for key, val in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    return json.dumps(clean(obj)) + "\n"


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _label(sampler):
    d = sampler.to_dict()
    params = " ".join(f"{key}={_cell(val)}" for key, val in d.items() if key != "kind")
    return f"{d['kind']} {params}".strip()


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _sampler_args(p):
    p.add_argument("--config", help="key = value experiment file")
    p.add_argument("--sampler", choices=sorted(geometry._SAMPLERS))
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--a", type=float)
    p.add_argument("--shift", type=_float_list)
    p.add_argument("--n", type=int)
    p.add_argument("--replicates", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=geometry.DEFAULT_TOL)
    p.add_argument("--threads", type=int, default=None)


def _experiment(args):
    if args.config:
        cfg = simulation.load_experiment(args.config)
        # explicit flags win over the file
        if args.n is not None:
            cfg["n"] = args.n
        return cfg
    if args.sampler is None:
        raise UsageError("either --config or --sampler is required\n")
    params = {"kind": args.sampler}
    for key in ("k", "p", "kappa", "mu", "a", "shift"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.n is None:
        raise UsageError("--n is required\n")
    return {
        "sampler": geometry.sampler_from_dict(params),
        "n": args.n,
        "replicates": args.replicates,
        "seed": args.seed,
        "radii": getattr(args, "radii", None) or [],
        "theta": tuple(args.theta) if getattr(args, "theta", None) else None,
    }


def build_parser():
    parser = _Parser(prog="elbounds", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("bound", help="exact b(k, n)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("table", help="table of b(k, r*k)")
    p.add_argument("--k", type=_int_list, default=list(bounds.TABLE1_K))
    p.add_argument("--ratios", type=_int_list, default=list(bounds.TABLE1_RATIOS))

    p = sub.add_parser("check-level", help="is a confidence level attainable?")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--level", type=float, required=True)

    p = sub.add_parser("hull", help="origin-in-hull test for a CSV point cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=geometry.DEFAULT_TOL)
    p.add_argument("--method", choices=("auto", "enumerate", "lp"), default="auto")

    p = sub.add_parser("el", help="EL log ratio for a CSV of m-values")
    p.add_argument("--input", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--level", type=float)
    p.add_argument("--tol", type=float, default=geometry.DEFAULT_TOL)

    p = sub.add_parser("circle", help="line / circle hull probabilities")
    p.add_argument("--density", choices=("uniform", "vonmises", "cardioid", "tabulated", "line"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--a", type=float)
    p.add_argument("--p", type=float, help="P(X = +1) for --density line")
    p.add_argument("--table", help="CSV of angle,density for --density tabulated")
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("mc-hull", help="MC estimate of P(0 in hull)")
    _sampler_args(p)

    p = sub.add_parser("mc-coverage", help="MC coverage of EL regions for the mean")
    _sampler_args(p)
    p.add_argument("--radii", type=_float_list)
    p.add_argument("--level", type=float, action="append", default=[],
                   help="add the chi-square radius for this level (repeatable)")
    p.add_argument("--theta", type=_float_list)

    p = sub.add_parser("lemma1", help="count verdict changes under projection")
    _sampler_args(p)
    p.set_defaults(replicates=10_000)

    p = sub.add_parser("conjecture", help="compare several laws against b(k, n)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shift", type=_float_list, action="append", default=[],
                   help="add a shifted Gaussian (repeatable)")
    p.add_argument("--replicates", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=geometry.DEFAULT_TOL)
    p.add_argument("--threads", type=int, default=None)
    return parser


def _cmd_bound(args, fmt):
    b = bounds.exact_bound(args.k, args.n)
    d = {"k": args.k, "n": args.n, **b.to_dict()}
    if fmt == "csv":
        return _csv(list(d), [list(d.values())])
    return _json(d)


def _cmd_table(args, fmt):
    if fmt == "json":
        rows = bounds.bound_table(args.k, args.ratios)
        return _json({"k": args.k, "ratios": args.ratios, "bounds": rows})
    return bounds.format_table_csv(args.k, args.ratios)


def _cmd_check_level(args, fmt):
    v = bounds.check_level(args.k, args.n, args.level)
    if fmt == "csv":
        return _csv(["k", "n", "requested_level", "bound", "achievable"],
                    [[args.k, args.n, v.requested_level, v.bound.value, v.achievable]])
    return _json({"k": args.k, "n": args.n, **v.to_dict()})


def _cmd_hull(args, fmt):
    X = geometry.read_points_csv(args.input)
    v = geometry.contains_origin(X, tol=args.tol, method=args.method)
    if fmt == "csv":
        kind, cert = ("weights", v.weights) if v.is_interior else ("direction", v.direction)
        return _csv(["status", "certificate_kind", "certificate"],
                    [[v.status.value, kind, cert.tolist()]])
    return _json({"n": X.shape[0], "k": X.shape[1], **v.to_dict()})


def _cmd_el(args, fmt):
    M = geometry.read_points_csv(args.input)
    ev = el.el_logratio(M, tol=args.tol)
    d = ev.to_dict()
    radius = args.radius
    if radius is None and args.level is not None:
        radius = el.chisq_radius(M.shape[1], args.level)
    if radius is not None:
        spec = el.RegionSpec(radius, args.level)
        d["radius"] = spec.radius
        d["in_region"] = ev.log_ratio < spec.radius
    if fmt == "csv":
        cols = ["status", "log_ratio", "iterations"] + [c for c in ("radius", "in_region") if c in d]
        return _csv(cols, [[ev.log_ratio if c == "log_ratio" else d[c] for c in cols]])
    return _json(d)


def _cmd_circle(args, fmt):
    n = args.n
    if args.density == "line":
        if args.p is None:
            raise UsageError("--p is required for --density line\n")
        inside = circle.line_prob(args.p, n)
        d = {"density": {"kind": "Line", "p": args.p}, "n": n, "inside": inside,
             "outside": 1.0 - inside, "symmetric": circle.line_prob(0.5, n)}
    else:
        if args.density == "uniform":
            dens = circle.CircularDensity.uniform()
        elif args.density == "vonmises":
            if args.kappa is None:
                raise UsageError("--kappa is required for --density vonmises\n")
            dens = circle.CircularDensity.von_mises(args.kappa, args.mu)
        elif args.density == "cardioid":
            if args.a is None:
                raise UsageError("--a is required for --density cardioid\n")
            dens = circle.CircularDensity.cardioid(args.a)
        else:
            if args.table is None:
                raise UsageError("--table is required for --density tabulated\n")
            dens = circle.CircularDensity.from_csv(args.table, normalize=args.normalize)
        forms = circle.outside_prob_forms(dens, n)
        outside = circle.circle_outside_prob(dens, n)
        d = {"density": dens.descriptor, "n": n, "inside": 1.0 - outside, "outside": outside,
             "forms": list(forms), "symmetric": circle.symmetric_prob(n)}
    if fmt == "csv":
        return _csv(["density", "n", "inside", "outside", "symmetric"],
                    [[d["density"]["kind"], n, d["inside"], d["outside"], d["symmetric"]]])
    return _json(d)


def _cmd_mc_hull(args, fmt):
    cfg = _experiment(args)
    rep = simulation.estimate_hull_prob(cfg["sampler"], cfg["n"], cfg["replicates"], cfg["seed"],
                                        tol=args.tol, workers=args.threads)
    k = cfg["sampler"].k
    bound = bounds.exact_bound(k, cfg["n"]).value
    if fmt == "csv":
        return simulation.reports_to_csv([rep], [{"k": k, "n": cfg["n"], "bound": bound}])
    return _json({"sampler": cfg["sampler"].to_dict(), "n": cfg["n"], "bound": bound,
                  "conjecture_dependent": k >= 3, "report": rep.to_dict()})


def _cmd_mc_coverage(args, fmt):
    cfg = _experiment(args)
    sampler = cfg["sampler"]
    radii = list(cfg["radii"]) + [el.chisq_radius(sampler.k, lv) for lv in args.level]
    if not radii:
        radii = [el.chisq_radius(sampler.k, 0.95), math.inf]
    problem = simulation.CoverageProblem(sampler, cfg["n"], cfg["theta"])
    reps = simulation.coverage_curve(problem, radii, cfg["replicates"], cfg["seed"],
                                     tol=args.tol, workers=args.threads)
    if fmt == "csv":
        return simulation.reports_to_csv(reps, [{"radius": _cell(float(r))} for r in radii])
    return _json({"sampler": sampler.to_dict(), "n": cfg["n"], "theta": list(problem.true_theta),
                  "bound": bounds.exact_bound(sampler.k, cfg["n"]).value,
                  "results": [{"radius": float(r), "report": rep.to_dict()} for r, rep in zip(radii, reps)]})


def _cmd_lemma1(args, fmt):
    cfg = _experiment(args)
    bad = simulation.verify_projection_invariance(cfg["sampler"], cfg["n"], cfg["replicates"],
                                                  cfg["seed"], tol=args.tol, workers=args.threads)
    d = {"sampler": cfg["sampler"].to_dict(), "n": cfg["n"], "replicates": cfg["replicates"],
         "seed": cfg["seed"], "mismatches": bad}
    if fmt == "csv":
        return _csv(["n", "replicates", "seed", "mismatches"],
                    [[cfg["n"], cfg["replicates"], cfg["seed"], bad]])
    return _json(d)


def _cmd_conjecture(args, fmt):
    k = args.k
    specs = [geometry.UniformSphere(k)]
    shifts = args.shift or [[1.0] + [0.0] * (k - 1), [0.5] * k, [0.25] + [0.0] * (k - 1)]
    for s in shifts:
        if len(s) != k:
            raise UsageError(f"--shift needs {k} coordinates\n")
        specs.append(geometry.ShiftedGaussian(tuple(s)))
    rows = simulation.conjecture_scan(k, args.n, specs, args.replicates, args.seed,
                                      tol=args.tol, workers=args.threads)
    if fmt == "csv":
        return _csv(["sampler", "estimate", "std_error", "bound", "gap", "within_bound", "conjecture_dependent"],
                    [[_label(r.sampler), r.report.estimate,
                      r.report.std_error, r.bound, r.gap, r.within_bound, r.conjecture_dependent]
                     for r in rows])
    return _json({"k": k, "n": args.n, "rows": [r.to_dict() for r in rows]})


_COMMANDS = {
    "bound": _cmd_bound,
    "table": _cmd_table,
    "check-level": _cmd_check_level,
    "hull": _cmd_hull,
    "el": _cmd_el,
    "circle": _cmd_circle,
    "mc-hull": _cmd_mc_hull,
    "mc-coverage": _cmd_mc_coverage,
    "lemma1": _cmd_lemma1,
    "conjecture": _cmd_conjecture,
}


def run(argv) -> CommandOutcome:
    """Parse ``argv`` and execute one subcommand without touching stdio."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError(parser.format_usage())
        fmt = args.format or ("csv" if args.command == "table" else "json")
        return CommandOutcome(EXIT_OK, _COMMANDS[args.command](args, fmt))
    except UsageError as exc:
        return CommandOutcome(EXIT_DOMAIN, diagnostics=str(exc))
    except (el.ELSolverError, circle.QuadratureError, RuntimeError, ArithmeticError) as exc:
        return CommandOutcome(EXIT_NUMERICAL, diagnostics=f"numerical failure: {exc}\n")
    except (ValueError, TypeError, OSError) as exc:
        return CommandOutcome(EXIT_DOMAIN, diagnostics=f"error: {exc}\n")


def main(argv=None) -> int:
    out = run(sys.argv[1:] if argv is None else argv)
    if out.payload:
        sys.stdout.write(out.payload)
    if out.diagnostics:
        sys.stderr.write(out.diagnostics)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
