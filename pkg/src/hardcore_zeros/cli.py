"""Command-line entry point: ``hardcore-zeros <subcommand> ...``.

Results go to stdout as canonical JSON (or CSV where asked), diagnostics to
stderr.  Exit codes: 0 success, 1 usage or internal error, 2 inconclusive
(a certificate could not be completed, or a search came back empty).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import jsonio
from .approx import approx_z
from .contraction import (c_delta, case34_bound_check, certify_contraction, g_prime,
                          g_second_derivative, alpha_delta, z_critical)
from .domain import (certify_graph, certify_sokal_angle, find_domain_constants,
                     replay_certificate)
from .dynamics import boundary_points, lambda_critical
from .errors import (CertificationFailed, ConditionViolated, ConstructionFailed, HardcoreError,
                     NoZeroFound, OutOfDomain)
from .graph import Graph, parse_edge_list
from .indpoly import z_coeffs, z_eval
from .ratio import ratio_via_elimination
from .zeros import build_counterexample, counterexample_to_tree, find_tree_zero

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    params: dict = field(default_factory=dict)
    fmt: str = "json"
    seed: int = 0
    jobs: int = 1


def parse_lambda(text: str, exact: bool = False):
    """``a`` or ``a,b`` (real, imaginary parts); ``a`` may be a fraction like 1/3."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        if exact:
            return Fraction(parts[0])
        return complex(float(Fraction(parts[0])), 0.0)
    if len(parts) == 2:
        if exact:
            raise argparse.ArgumentTypeError("exact mode needs a real lambda")
        return complex(float(Fraction(parts[0])), float(Fraction(parts[1])))
    raise argparse.ArgumentTypeError(f"cannot parse lambda {text!r}")


def read_graph(path: str, strip_loops: bool = False) -> Graph:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_edge_list(text, strip_loops=strip_loops)


def _graph(cfg) -> Graph:
    return read_graph(cfg.graph, cfg.params.get("strip_loops", False))


def _emit(obj, out):
    out.write(jsonio.dumps(obj) + "\n")


# -- subcommands --------------------------------------------------------------

def cmd_zeval(cfg, out):
    g = _graph(cfg)
    lam = parse_lambda(cfg.params["lambda"], cfg.params["exact"])
    z = z_eval(g, lam)
    res = {"z": complex(z)}
    if cfg.params["exact"]:
        res["exact"] = str(z)
    _emit(res, out)
    return EXIT_OK


def cmd_zcoeffs(cfg, out):
    _emit({"coeffs": z_coeffs(_graph(cfg))}, out)
    return EXIT_OK


def cmd_ratio(cfg, out):
    g = _graph(cfg)
    lam = parse_lambda(cfg.params["lambda"])
    r, trace = ratio_via_elimination(g, cfg.params["vertex"], lam)
    res = {"ratio": complex(r), "vertex": cfg.params["vertex"]}
    if cfg.params["trace"]:
        res["trace"] = [s.to_dict() for s in trace.steps]
    _emit(res, out)
    return EXIT_OK


def cmd_region(cfg, out):
    delta, n = cfg.params["delta"], cfg.params["points"]
    pts = boundary_points(delta - 1, n)
    rows = [(2 * math.pi * j / n, p) for j, p in enumerate(pts)]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "re", "im"])
        for th, p in rows:
            w.writerow(["%.15g" % th, "%.15g" % p.real, "%.15g" % p.imag])
        out.write(buf.getvalue())
    else:
        _emit({"delta": delta, "points": [{"theta": th, "lambda": p} for th, p in rows]}, out)
    return EXIT_OK


def cmd_certify_contraction(cfg, out):
    try:
        rep = certify_contraction(cfg.params["delta"], cfg.params["eps"],
                                  resolution=cfg.params["resolution"], jobs=cfg.jobs)
        code = EXIT_OK
    except CertificationFailed as exc:
        rep, code = exc.report, EXIT_INCONCLUSIVE
        print(str(exc), file=sys.stderr)
    _emit(rep.to_dict(), out)
    return code


def cmd_certify(cfg, out):
    g = _graph(cfg)
    lam = parse_lambda(cfg.params["lambda"])
    delta, eps = cfg.params["delta"], cfg.params["eps"]
    try:
        if cfg.params["mode"] == "angle":
            cert = certify_sokal_angle(g, lam, eps, delta=delta)
        else:
            spec = find_domain_constants(delta, eps)
            cert = certify_graph(g, lam, spec)
    except (OutOfDomain, ConditionViolated) as exc:
        print(str(exc), file=sys.stderr)
        _emit(exc.certificate.to_dict(), out)
        return EXIT_INCONCLUSIVE
    res = cert.to_dict()
    if cfg.params["mode"] == "domain":
        res["replay_error"] = replay_certificate(cert, g)
    _emit(res, out)
    return EXIT_OK


def cmd_find_zero(cfg, out):
    seed = parse_lambda(cfg.params["seed_lambda"])
    try:
        w = find_tree_zero(cfg.params["delta"], seed, k_max=cfg.params["kmax"])
    except NoZeroFound as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    _emit(w.to_dict(), out)
    return EXIT_OK


def cmd_counterexample(cfg, out):
    try:
        w = build_counterexample(cfg.params["delta"], cfg.params["width"])
    except ConstructionFailed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    tree = counterexample_to_tree(w)
    res = w.to_dict()
    res["tree"] = {"validated": tree.validated, "validation": tree.validation,
                   "residual": tree.residual, "root_ratio": tree.root_ratio}
    _emit(res, out)
    return EXIT_OK


def cmd_approx(cfg, out):
    g = _graph(cfg)
    lam = parse_lambda(cfg.params["lambda"])
    if lam.imag != 0:
        raise argparse.ArgumentTypeError("approx takes a real lambda")
    a = approx_z(g, lam.real, cfg.params["order"], delta=cfg.params["delta"])
    _emit({"value": a.value, "error_estimate": a.error_estimate, "heuristic": True,
           "order": a.m, "w_star": a.w_star}, out)
    return EXIT_OK


SELFTEST_TABLE = {5: -0.0450, 6: -0.0809, 7: -0.0887}


def selftest_checks(seed: int = 0) -> list[dict]:
    """Published constants reproduced from scratch; each entry has a pass flag."""
    checks = []

    def add(name, value, expected, tol, ok=None):
        ok = abs(value - expected) <= tol if ok is None else ok
        checks.append({"name": name, "value": value, "expected": expected, "tol": tol, "pass": bool(ok)})

    for delta, ref in SELFTEST_TABLE.items():
        add(f"c({delta})", c_delta(delta), ref, 5e-4)
    add("alpha_3", alpha_delta(3), 2.405, 1e-3)
    add("alpha_4", alpha_delta(4), 2.575, 1e-3)
    for delta, ref in ((3, -0.9168), (4, -0.8979)):
        m = case34_bound_check(delta, seed=seed).minimum
        add(f"case34_min({delta})", m, ref, 2e-3, abs(m - ref) <= 2e-3 and m >= -0.92)
    for delta in range(3, 8):
        z = z_critical(delta)
        lc = lambda_critical(delta)
        add(f"gprime_at_critical({delta})", g_prime(delta, delta - 1, lc, z).real, -1.0, 1e-9)
        add(f"gsecond_at_critical({delta})", g_second_derivative(delta, delta - 1, lc, z).real, 0.0, 1e-8)
    return checks


def cmd_selftest(cfg, out):
    checks = selftest_checks(cfg.seed)
    ok = all(c["pass"] for c in checks)
    for c in checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: {c['value']:.6g}", file=sys.stderr)
    _emit({"checks": checks, "pass": ok}, out)
    return EXIT_OK if ok else EXIT_ERROR


COMMANDS = {
    "zeval": cmd_zeval, "zcoeffs": cmd_zcoeffs, "ratio": cmd_ratio, "region": cmd_region,
    "certify-contraction": cmd_certify_contraction, "certify": cmd_certify,
    "find-zero": cmd_find_zero, "counterexample": cmd_counterexample, "approx": cmd_approx,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")
    base.add_argument("--format", choices=("json", "csv"), default=None, dest="fmt")
    common = argparse.ArgumentParser(add_help=False, parents=[base])
    common.add_argument("--seed", type=int, default=0, help="RNG seed (HZ_SEED overrides)")

    p = argparse.ArgumentParser(prog="hardcore-zeros", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--graph", required=True, help="edge-list file, or - for stdin")
        s.add_argument("--strip-loops", action="store_true",
                       help="delete looped vertices instead of rejecting the input")
        return s

    s = graph_cmd("zeval", "evaluate Z_G(lambda)")
    s.add_argument("--lambda", required=True, dest="lam")
    s.add_argument("--exact", action="store_true", help="rational arithmetic (real lambda only)")
    graph_cmd("zcoeffs", "coefficients of Z_G")
    s = graph_cmd("ratio", "occupation ratio R_{G,v}")
    s.add_argument("--vertex", type=int, default=0)
    s.add_argument("--lambda", required=True, dest="lam")
    s.add_argument("--trace", action="store_true")
    s = sub.add_parser("region", parents=[common], help="boundary points of U_{delta-1}")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--points", type=int, default=64)
    s = sub.add_parser("certify-contraction", parents=[common], help="grid certificate for |g'| < 1")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--resolution", type=int, default=2000)
    s = graph_cmd("certify", "certify Z_G(lambda) != 0")
    s.add_argument("--lambda", required=True, dest="lam")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--mode", choices=("domain", "angle"), default="domain")
    s = sub.add_parser("find-zero", parents=[base], help="tree zero near a seed activity")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--seed", required=True, dest="seed_lambda", help="seed activity a or a,b")
    s.add_argument("--kmax", type=int, default=60)
    s = sub.add_parser("counterexample", parents=[common], help="level activities with Z = 0")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--width", type=float, required=True)
    s = graph_cmd("approx", "interpolation-method approximation of Z_G(lambda)")
    s.add_argument("--lambda", required=True, dest="lam")
    s.add_argument("--order", type=int, default=15)
    s.add_argument("--delta", type=int, default=None)
    sub.add_parser("selftest", parents=[common], help="reproduce the published constants")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items()
              if k not in ("command", "graph", "fmt", "seed", "jobs")}
    if "lam" in params:
        params["lambda"] = params.pop("lam")
    seed = int(os.environ["HZ_SEED"]) if os.environ.get("HZ_SEED") else getattr(ns, "seed", 0)
    default_fmt = "csv" if ns.command == "region" else "json"
    return RunConfig(ns.command, getattr(ns, "graph", None), params, ns.fmt or default_fmt,
                     seed, max(1, ns.jobs))


_VALUE_OPTIONS = ("--lambda", "--seed")
_NUMERIC = re.compile(r"^-[\d.]")


def _glue_negative_values(argv):
    """Turn ``--lambda -0.5,1`` into ``--lambda=-0.5,1`` so argparse does not read an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and _NUMERIC.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    cfg = config_from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg, out)
    except (HardcoreError, ValueError, OSError, argparse.ArgumentTypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
