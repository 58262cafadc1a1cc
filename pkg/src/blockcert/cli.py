"""Command-line interface: ``blockcert <verb> bundle.json [options]``.

Exit codes: 0 success/certified, 2 inconclusive, 1 input or numerical error.
"""

import argparse
import csv
import io
import json
import sys as _sys
from pathlib import Path

import numpy as np

from . import __version__
from .bundle import FORMAT, BundleError, dump_json, load_network, load_system
from .certify import certify_hinf
from .comparison import ComparisonVariant, comparison_matrix
from .exceptions import BlockCertError, ComparisonUnstableError, DeltaTooSmallError, NotHurwitzError
from .flow import comparison_trajectory_bound
from .linalg import HURWITZ_GUARD, hinf_norm, spectral_abscissa
from .network import network_hinf_certificate
from .stability_tests import run_all_tests

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class _Fail(Exception):
    def __init__(self, message, code=EXIT_ERROR, doc=None):
        super().__init__(message)
        self.code = code
        self.doc = doc


def _emit(args, doc, text):
    out = dump_json(doc) if args.output_format == "json" else text
    if getattr(args, "output", None):
        Path(args.output).write_text(out + "\n", encoding="utf-8")
    else:
        print(out)


def _fmt_matrix(M):
    return "\n".join("  " + " ".join(f"{x: .6g}" for x in row) for row in np.atleast_2d(M))


def _scaling_doc(sv):
    return {"d": sv.d, "e": sv.e, "g": sv.g, "f": sv.f, "slack": sv.slack}


def cmd_certify(args):
    system = load_system(args.bundle)
    base = {"format": FORMAT, "command": "certify", "name": system.name}
    try:
        cert = certify_hinf(system, args.delta)
    except ComparisonUnstableError as exc:
        doc = dict(base, verdict="inconclusive", reason=str(exc), abscissa=exc.abscissa)
        raise _Fail(str(exc), EXIT_INCONCLUSIVE, doc) from None
    except DeltaTooSmallError as exc:
        doc = dict(base, verdict="inconclusive", reason=str(exc))
        raise _Fail(str(exc), EXIT_INCONCLUSIVE, doc) from None
    except NotHurwitzError as exc:
        doc = dict(base, verdict="rejected", reason=str(exc), block=None if exc.block is None else exc.block + 1)
        raise _Fail(str(exc), EXIT_ERROR, doc) from None
    doc = dict(base, verdict="certified", delta=cert.delta, comparison_norm=cert.comparison_norm,
               blocks=cert.blocks,
               residuals={"lyapunov": cert.lyapunov_residual, "riccati": cert.riccati_residual},
               scaling=_scaling_doc(cert.scaling), timings=cert.timings)
    lines = [f"verdict: certified",
             f"delta: {cert.delta:.10g}",
             f"comparison norm: {cert.comparison_norm:.10g}",
             f"Lyapunov residual: {cert.lyapunov_residual:.6g}",
             f"Riccati residual: {cert.riccati_residual:.6g}"]
    if not args.no_norm:
        true = hinf_norm(system.A, system.B, system.C, system.D, tol=args.tolerance)
        doc["system_norm"] = true
        doc["ratio"] = cert.comparison_norm / true if true > 0 else None
        lines.append(f"system norm: {true:.10g}")
        if true > 0:
            lines.append(f"comparison norm / system norm: {cert.comparison_norm / true:.6f}")
    lines.append("timings: " + ", ".join(f"{k} {v:.4f}s" for k, v in cert.timings.items()))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_compare(args):
    system = load_system(args.bundle)
    variant = ComparisonVariant.parse(args.variant)
    M = comparison_matrix(system.A, system.state_partition, variant)
    alpha = spectral_abscissa(M)
    hurwitz = bool(alpha < -HURWITZ_GUARD)
    doc = {"format": FORMAT, "command": "compare", "variant": variant.value, "matrix": M,
           "hurwitz": hurwitz, "abscissa": alpha}
    _emit(args, doc, f"{variant.value} comparison matrix:\n{_fmt_matrix(M)}\n"
                     f"Hurwitz: {hurwitz} (spectral abscissa {alpha:.6g})")
    return EXIT_OK if hurwitz else EXIT_INCONCLUSIVE


def cmd_tests(args):
    system = load_system(args.bundle)
    reports = run_all_tests(system.A, system.state_partition, args.epsilon)
    items = []
    lines = []
    for r in reports:
        items.append({"test": r.test_id, "hurwitz": r.hurwitz, "abscissa": r.abscissa,
                      "epsilon": r.epsilon_used, "epsilon_sensitive": r.epsilon_sensitive,
                      "F": r.F_test})
        flag = " (verdict flips with epsilon/10)" if r.epsilon_sensitive else ""
        lines.append(f"test {r.test_id:>3}: {'pass' if r.hurwitz else 'fail'}  "
                     f"abscissa {r.abscissa: .6g}{flag}")
    doc = {"format": FORMAT, "command": "tests", "reports": items}
    if system.state_partition.n == 2:
        doc["note"] = "with two blocks all four tests are equivalent"
        lines.append(doc["note"])
    cert = next((r.certificate for r in reports if r.certificate is not None), None)
    if cert is not None:
        doc["certificate"] = {"blocks": cert.blocks, "lyapunov_residual": cert.lyapunov_residual}
        lines.append(f"block-diagonal Lyapunov certificate: residual {cert.lyapunov_residual:.6g}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if any(r.hurwitz for r in reports) else EXIT_INCONCLUSIVE


def _read_vector(spec, n, what):
    path = Path(spec)
    if path.exists():
        text = path.read_text(encoding="utf-8").strip()
        vals = json.loads(text) if text.startswith("[") else [float(x) for x in text.replace(",", " ").split()]
    else:
        vals = [float(x) for x in spec.replace(",", " ").split()]
    v = np.asarray(vals, dtype=float).ravel()
    if v.size != n:
        raise _Fail(f"{what} has {v.size} entries, expected {n}")
    return v


def _read_inputs(path, m):
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        U = np.asarray(json.loads(text), dtype=float)
    else:
        U = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2)
    U = np.atleast_2d(U)
    if U.shape[1] != m:
        raise _Fail(f"input file has {U.shape[1]} columns, expected {m}")
    return U


def cmd_simulate(args):
    system = load_system(args.bundle)
    x0 = _read_vector(args.x0, system.N, "x0") if args.x0 else np.zeros(system.N)
    U = _read_inputs(args.input, system.B.shape[1]) if args.input else None
    rep = comparison_trajectory_bound(system, x0, U, horizon=args.horizon, step=args.step)
    names, data = rep.as_table()
    if args.output_format == "json":
        doc = {"format": FORMAT, "command": "simulate", "max_violation": rep.max_violation,
               "columns": names, "samples": data}
        _emit(args, doc, "")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([repr(float(x)) for x in row])
        text = buf.getvalue() + f"# max_violation {rep.max_violation!r}"
        if args.output:
            Path(args.output).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    return EXIT_OK


def cmd_network(args):
    net = load_network(args.bundle)
    base = {"format": FORMAT, "command": "network", "decoupled": args.decoupled}
    try:
        cert = network_hinf_certificate(net, args.delta, decoupled=args.decoupled)
    except (ComparisonUnstableError, DeltaTooSmallError) as exc:
        raise _Fail(str(exc), EXIT_INCONCLUSIVE, dict(base, verdict="inconclusive", reason=str(exc))) from None
    doc = dict(base, verdict="certified", delta=cert.delta, comparison_norm=cert.comparison_norm,
               blocks=cert.blocks,
               residuals={"lyapunov": cert.lyapunov_residual, "riccati": cert.riccati_residual,
                          "local": cert.local_residuals},
               supply=[{"Y11": y11, "Y22": y22} for y11, y22 in cert.supply],
               scaling=_scaling_doc(cert.scaling), timings=cert.timings)
    _emit(args, doc, "\n".join([
        "verdict: certified",
        f"delta: {cert.delta:.10g}",
        f"comparison norm: {cert.comparison_norm:.10g}",
        f"Riccati residual: {cert.riccati_residual:.6g}",
        f"local residuals: {', '.join(f'{r:.3g}' for r in cert.local_residuals)}"]))
    return EXIT_OK


def cmd_norm(args):
    system = load_system(args.bundle)
    val = hinf_norm(system.A, system.B, system.C, system.D, tol=args.tolerance)
    _emit(args, {"format": FORMAT, "command": "norm", "hinf_norm": val}, f"{val:.12g}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="blockcert",
                                description="Block-diagonal stability and H-infinity certificates "
                                            "from comparison systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("bundle", help="JSON bundle")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--json", dest="output_format", action="store_const", const="json")
        g.add_argument("--text", dest="output_format", action="store_const", const="text")
        sp.add_argument("-o", "--output", help="write the result to a file instead of stdout")
        sp.set_defaults(output_format="json")

    sp = sub.add_parser("certify", help="block-diagonal bounded-real certificate")
    common(sp)
    sp.add_argument("--delta", type=float, help="level to certify (default 1.001 x comparison norm)")
    sp.add_argument("--tolerance", type=float, default=1e-8,
                    help="relative tolerance of the reported system norm")
    sp.add_argument("--no-norm", action="store_true", help="skip computing the system's own norm")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("compare", help="comparison matrix and its Hurwitz verdict")
    common(sp)
    sp.add_argument("--variant", default="M", choices=["M", "Mtilde", "N"])
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("tests", help="the four distributed stability tests")
    common(sp)
    sp.add_argument("--epsilon", type=float, help="diagonal margin (default 1e-6 x max weight)")
    sp.set_defaults(func=cmd_tests)

    sp = sub.add_parser("simulate", help="trajectory bounds from the comparison system")
    common(sp)
    sp.set_defaults(output_format="text")
    sp.add_argument("--x0", help="initial state: comma separated values or a file")
    sp.add_argument("--horizon", type=float, default=1.0)
    sp.add_argument("--step", type=float, help="RK4 step (default horizon / 1e4)")
    sp.add_argument("--input", help="CSV or JSON file of input samples, one row per grid point")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("network", help="certificate for an interconnection of subsystems")
    common(sp)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--decoupled", action="store_true",
                    help="use the comparison system that separates subsystem and coupling gains")
    sp.set_defaults(func=cmd_network)

    sp = sub.add_parser("norm", help="H-infinity norm of the bundle's system")
    common(sp)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.set_defaults(func=cmd_norm)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        if exc.doc is not None:
            _emit(args, exc.doc, f"verdict: {exc.doc.get('verdict')}\nreason: {exc}")
        print(f"blockcert: {exc}", file=_sys.stderr)
        return exc.code
    except (BundleError, BlockCertError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"blockcert: error: {exc}", file=_sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
