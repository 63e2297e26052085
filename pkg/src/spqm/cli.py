"""Command-line experiment runner.

Subcommands
-----------
simulate
    Integrate one measurement record in the HC chart and dump the
    trajectory with its closed-form endpoint cross-check.
moments
    Sweep the moment curves (Riccati integration vs closed forms).
distributions
    Tabulate the reduced-distribution summary functions, optionally
    with a weighted Monte Carlo estimate of the normalization.
povm
    Partition-function, completeness, and (small dim) channel checks.
verify
    Run the full verification suite; exit 0 iff every check passes.

Every output file starts with a single JSON metadata line (parameters,
seed, version) followed by data rows in CSV or JSON-lines form.  All
randomness derives from the --seed flag.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__, dists, moments, paths, povm, verify

__all__ = ["main"]


def _metadata(args, **extra):
    meta = {"artifact": "spqm", "version": __version__,
            "subcommand": args.command}
    for key in ("kappa", "t_final", "dt", "dim", "paths", "seed"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    return meta


def _write(out_path, metadata, header, rows, fmt):
    """One JSON metadata line, then data rows (CSV or JSON lines)."""
    buf = io.StringIO()
    buf.write(json.dumps(metadata) + "\n")
    if fmt == "csv":
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
    else:
        for row in rows:
            buf.write(json.dumps(dict(zip(header, row))) + "\n")
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _steps(args):
    n = int(round(args.t_final / args.dt))
    if n < 1 or abs(n * args.dt - args.t_final) > 1e-9 * args.dt:
        raise SystemExit(f"error: t-final {args.t_final} is not a positive "
                         f"multiple of dt {args.dt}")
    return n


def _cmd_simulate(args):
    n = _steps(args)
    path = paths.sample_wiener(n, args.dt, args.kappa, args.seed)
    traj = paths.propagate_sde(path, chart="hc")
    closed = paths.closed_form_hc(path)
    end = traj.hc[-1]
    deviation = max(abs(end.nu - closed.nu), abs(end.mu - closed.mu),
                    abs(end.z - closed.z))
    header = ["k", "t", "re_dw", "im_dw", "re_nu", "im_nu", "r", "s", "psi",
              "re_mu", "im_mu"]
    rows = []
    for k, x in enumerate(traj.hc[1:]):
        dw = path.increments[k]
        rows.append([k, (k + 1) * args.dt, dw.real, dw.imag, x.nu.real,
                     x.nu.imag, x.r, x.s, x.psi, x.mu.real, x.mu.imag])
    meta = _metadata(args, closed_form_deviation=deviation)
    _write(args.out, meta, header, rows, args.format)
    return 0


def _cmd_moments(args):
    steps = max(100, int(round(1000 * args.kappa * args.t_final)))
    times, n, m, q = moments.riccati_integrate(args.kappa, args.t_final, steps)
    kts = args.kappa * times
    ref = moments.analytic_moments(kts)
    dets = moments.analytic_determinant(kts)
    header = ["kT", "n", "m", "q", "n_closed", "q_closed", "det_closed"]
    rows = [[kts[i], n[i], m[i], q[i], ref.n[i], ref.q[i], dets[i]]
            for i in range(0, len(kts), max(1, len(kts) // 1000))]
    if rows[-1][0] != kts[-1]:
        rows.append([kts[-1], n[-1], m[-1], q[-1], ref.n[-1], ref.q[-1],
                     dets[-1]])
    _write(args.out, _metadata(args), header, rows, args.format)
    return 0


def _cmd_distributions(args):
    kts = np.linspace(args.t_final / 50, args.t_final, 50) * args.kappa
    triples = moments.analytic_moments(kts)
    header = ["kT", "sigma", "normalization", "n", "m", "q"]
    rows = [[kt, dists.sigma_width(kt), dists.normalization_factor(kt),
             triples.n[i], triples.m[i], triples.q[i]]
            for i, kt in enumerate(kts)]
    extra = {}
    if args.paths:
        n = _steps(args)
        est = dists.feynman_kac_estimate(
            "plain", "exp_neg_2s", "one", n_paths=args.paths, N=n,
            dt=args.dt, kappa=args.kappa, seed=args.seed)
        extra = {"fk_normalization": est.mean, "fk_stderr": est.stderr,
                 "fk_ess": est.ess,
                 "fk_closed_form": 1 / dists.normalization_factor(
                     args.kappa * args.t_final)}
    _write(args.out, _metadata(args, **extra), header, rows, args.format)
    return 0


def _cmd_povm(args):
    kt = args.kappa * args.t_final
    partition = povm.partition_function_check(kt, args.dim)
    completeness = povm.completeness_quadrature(kt, args.dim)
    report = {"partition_residual": partition["residual"],
              "partition_truncation_warning": partition["truncation_warning"],
              "completeness_deviation": completeness}
    if args.dim <= 10 and args.paths:
        rho = np.zeros((args.dim, args.dim), dtype=complex)
        rho[0, 0] = 1.0
        channel = povm.channel_monte_carlo(rho, kt, args.paths, args.dt,
                                           args.dim, args.seed)
        report.update(channel_trace_distance=channel.trace_distance,
                      channel_trace_mean=channel.trace_mean,
                      channel_trace_stderr=channel.trace_stderr)
    header = sorted(report)
    _write(args.out, _metadata(args), header, [[report[k] for k in header]],
           args.format)
    return 0


def _cmd_verify(args):
    results = verify.run_all()
    report = verify.format_report(results)
    print(report)
    if args.out:
        meta = _metadata(args)
        header = ["number", "name", "passed", "detail", "elapsed"]
        rows = [[r.number, r.name, r.passed, r.detail, r.elapsed]
                for r in results]
        _write(args.out, meta, header, rows, args.format)
    return 0 if all(r.passed for r in results) else 1


def _add_common(parser, dt_required=False, dt_default=None):
    parser.add_argument("--kappa", type=float, default=1.0,
                        help="measurement rate (default 1.0)")
    parser.add_argument("--t-final", dest="t_final", type=float, default=1.0,
                        help="final time (default 1.0)")
    if dt_required:
        parser.add_argument("--dt", type=float, required=True,
                            help="time step (required)")
    else:
        parser.add_argument("--dt", type=float, default=dt_default,
                            help="time step")
    parser.add_argument("--dim", type=int, default=24,
                        help="Fock truncation dimension (default 24)")
    parser.add_argument("--paths", type=int, default=0,
                        help="Monte Carlo path count (0 = skip MC)")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed; all randomness derives from it")
    parser.add_argument("--out", default=None,
                        help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="data-row format (default csv)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spqm",
        description="Simultaneous P&Q measurement: simulation and "
                    "verification of the Kraus-operator diffusion.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one measurement record")
    _add_common(p, dt_required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("moments", help="moment curves and closed forms")
    _add_common(p, dt_default=1e-3)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("distributions",
                       help="reduced-distribution summary functions")
    _add_common(p, dt_default=1e-2)
    p.set_defaults(func=_cmd_distributions)

    p = sub.add_parser("povm", help="POVM completeness and channel checks")
    _add_common(p, dt_default=1e-3)
    p.set_defaults(func=_cmd_povm)

    p = sub.add_parser("verify", help="run the full verification suite")
    _add_common(p, dt_default=1e-3)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
