"""Command-line interface.

Exit codes: 0 success, 2 a suite verdict was violated, 3 a suite was
inconclusive, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import freidlin as fr
from . import medium as med
from . import operators as ops
from . import pde
from . import speedlab as lab
from . import variational as var
from .manifest import RunManifest

EXIT_OK = 0
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3
EXIT_NUMERICAL = 4


def _load_config(args) -> dict:
    overrides = {}
    if args.config:
        overrides = json.loads(Path(args.config).read_text())
    cfg = lab.make_config(**overrides)
    if args.seed is not None:
        cfg["master_seed"] = args.seed
    if args.tol is not None:
        cfg["tol"] = args.tol
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_dat(path: Path, rows, header: str) -> Path:
    lines = [f"# {header}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _sample(cfg, stream: int):
    return med.sample_realization(med.spec_from_dict(cfg["ensemble"]),
                                  cfg["master_seed"], stream,
                                  cfg["X"], cfg["h"])


def cmd_medium_sample(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    path = med.save_realization(m, out / f"medium_{args.stream}.kppm")
    em = med.empirical_means(m)
    print(f"wrote {path} (N={m.N}, X={m.X:g}, h={m.h:g}); "
          f"mean_c={em.mean_c:.6g} mean_a={em.mean_a:.6g} "
          f"mean_inv_a={em.mean_inv_a:.6g}")
    return EXIT_OK


def cmd_eigen_kp(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    ps = np.linspace(args.p_min, args.p_max, args.p_count)
    curve = ops.kp_curve(m, ps, tol=cfg["tol"])
    _write_dat(out / "kp_curve.dat", curve, "p  k_p")
    res = ops.k_p(m, args.p, tol=cfg["tol"])
    payload = out / "kp.json"
    payload.write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"k_p(p={args.p:g}) = {res.lam!r}  residual={res.residual:.2e} "
          f"iters={res.iters}")
    return EXIT_OK


def cmd_eigen_speed(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    est = ops.speed_from_kp(m, cfg["p_lo"], cfg["p_hi"], tol=cfg["speed_tol"])
    rows = sorted((float(k), v) for k, v in est.provenance["kp_evals"].items())
    _write_dat(out / "kp_curve.dat", rows, "p  k_p")
    (out / "speed_eigen.json").write_text(
        json.dumps(est.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"w* = {est.value!r} at p* = {est.optimizer!r} (err {est.err:.2e})")
    return EXIT_OK


def cmd_freidlin_mu(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    lam1 = ops.k_p(m, 0.0, tol=cfg["tol"]).lam
    lo = args.gamma_min if args.gamma_min is not None else max(
        lam1 + 2 * fr.default_margin(lam1),
        float(np.max(m.c)) + fr.default_margin(lam1))
    hi = args.gamma_max if args.gamma_max is not None else 4.0 * lo
    gammas = np.linspace(lo, hi, args.gamma_count)
    curve = fr.mu_curve(m, gammas)
    curve.to_csv(out / "mu_curve.csv")
    _write_dat(out / "mu_curve.dat",
               np.column_stack([curve.gamma, curve.mu]), "gamma  mu")
    print(f"mu curve on [{lo:g}, {hi:g}] written "
          f"(Lambda_1 ~ {curve.lambda1_estimate:.6g})")
    return EXIT_OK


def cmd_freidlin_speed(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    est = fr.speed_freidlin(m, tol=cfg["speed_tol"])
    (out / "speed_freidlin.json").write_text(
        json.dumps(est.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"w* = {est.value!r} at gamma* = {est.optimizer!r} "
          f"(mu* = {est.provenance['mu_star']:.6g})")
    return EXIT_OK


def cmd_variational_minimize(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    m = _sample(cfg, args.stream)
    if args.p is not None:
        p = args.p
    else:
        p = 1.5 * ops.speed_from_kp(m, cfg["p_lo"], cfg["p_hi"],
                                    tol=cfg["speed_tol"]).optimizer
    res = var.minimize_theta(m, p, max_iters=args.max_iters)
    theta_path = out / "theta.f64"
    theta_path.write_bytes(np.ascontiguousarray(
        res.theta.theta, dtype="<f8").tobytes())
    kp = ops.k_p(m, p, tol=cfg["tol"]).lam
    summary = {
        "p": p, "k0_value": res.k0_value, "k_p_direct": kp,
        "gap_vs_direct": res.gap_vs_direct, "grad_norm": res.grad_norm,
        "iters": res.iters, "theta_sup_norm": res.theta.sup_norm,
        "theta_file": theta_path.name, "N": m.N, "h": m.h, "X": m.X,
        "realization_id": m.realization_id,
    }
    (out / "theta_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"min theta value = {res.k0_value!r} vs k_p = {kp!r} "
          f"(gap {res.gap_vs_direct:.3e}, {res.iters} iterations)")
    return EXIT_OK


def cmd_pde_run(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    pcfg = cfg["pde"]
    m = med.sample_realization(med.spec_from_dict(cfg["ensemble"]),
                               cfg["master_seed"], args.stream,
                               cfg["X"], pcfg["h"])
    trace = pde.simulate(m, pde.ReactionSpec("logistic_c"), T=pcfg["T"],
                         dt=pcfg["dt"], snapshot_every=pcfg["snapshot_every"])
    trace.to_csv(out / "front.csv")
    _write_dat(out / "front.dat",
               np.column_stack([trace.times, trace.positions]), "t  position")
    print(f"front trace with {trace.times.size} snapshots written")
    return EXIT_OK


def cmd_pde_speed(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    pcfg = cfg["pde"]
    m = med.sample_realization(med.spec_from_dict(cfg["ensemble"]),
                               cfg["master_seed"], args.stream,
                               cfg["X"], pcfg["h"])
    trace = pde.simulate(m, pde.ReactionSpec("logistic_c"), T=pcfg["T"],
                         dt=pcfg["dt"], snapshot_every=pcfg["snapshot_every"])
    est = pde.front_speed(trace, pcfg["fit_fraction"])
    (out / "speed_pde.json").write_text(
        json.dumps(est.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"fitted front speed = {est.value!r} +- {est.err:.3g}")
    return EXIT_OK


def cmd_pde_dichotomy(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    pcfg = cfg["pde"]
    m = med.sample_realization(med.spec_from_dict(cfg["ensemble"]),
                               cfg["master_seed"], args.stream,
                               cfg["X"], pcfg["h"])
    if args.w_star is not None:
        w = args.w_star
    else:
        me = med.sample_realization(med.spec_from_dict(cfg["ensemble"]),
                                    cfg["master_seed"], args.stream,
                                    cfg["X"], cfg["h"])
        w = ops.speed_from_kp(me, cfg["p_lo"], cfg["p_hi"],
                              tol=cfg["speed_tol"]).value
    report = pde.dichotomy_check(m, pde.ReactionSpec("logistic_c"), w,
                                 args.deltas, T=args.T, dt=pcfg["dt"])
    (out / "dichotomy.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n")
    for rec in report:
        print(rec)
    ok = all(r["inside_ok"] and r["outside_ok"]
             for r in report if r["inside_ok"] is not None)
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_suite(args) -> int:
    cfg = _load_config(args)
    report = lab.run_suite(args.name, cfg, out_dir=_out_dir(args),
                           threads=args.threads)
    for v in report.verdicts:
        print(f"[{v.verdict:>12}] {v.claim}: margin {v.margin:+.3e} "
              f"(tol {v.tolerance:g})")
    if report.any_violated:
        return EXIT_VIOLATED
    if not report.all_verified:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_report(args) -> int:
    run_dir = Path(args.run_id)
    manifest = RunManifest.read(run_dir / "manifest.json")
    print(f"run {manifest['run_key']} (tool {manifest['tool_version']})")
    print(f"  started  {manifest['started_at']}")
    print(f"  finished {manifest['finished_at']}")
    print(f"  master_seed {manifest['master_seed']}")
    for rec in manifest["outputs"]:
        print(f"  output {rec['path']}  sha {rec['sha']}")
    for path in sorted(run_dir.glob("*_report.json")):
        data = json.loads(path.read_text())
        print(f"  suite {data['suite']}:")
        for v in data["verdicts"]:
            print(f"    [{v['verdict']:>12}] {v['claim']} "
                  f"margin {v['margin']:+.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kpplab",
        description="Spreading speeds of 1-D KPP fronts in heterogeneous media")
    ap.add_argument("--config", help="JSON config file (merged over defaults)")
    ap.add_argument("--seed", type=int, help="master seed override")
    ap.add_argument("--out", default="runs/latest", help="output directory")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--tol", type=float, help="eigen tolerance override")
    sub = ap.add_subparsers(dest="command", required=True)

    p_med = sub.add_parser("medium", help="medium generation")
    med_sub = p_med.add_subparsers(dest="subcommand", required=True)
    p = med_sub.add_parser("sample", help="sample and persist one realization")
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(fn=cmd_medium_sample)

    p_eig = sub.add_parser("eigen", help="tilted-operator eigenvalues")
    eig_sub = p_eig.add_subparsers(dest="subcommand", required=True)
    p = eig_sub.add_parser("kp", help="k_p at one tilt plus a (p, k_p) curve")
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--p-min", type=float, default=0.2)
    p.add_argument("--p-max", type=float, default=2.0)
    p.add_argument("--p-count", type=int, default=10)
    p.set_defaults(fn=cmd_eigen_kp)
    p = eig_sub.add_parser("speed", help="w* by eigenvalue minimization")
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(fn=cmd_eigen_speed)

    p_fr = sub.add_parser("freidlin", help="Lyapunov-exponent route")
    fr_sub = p_fr.add_subparsers(dest="subcommand", required=True)
    p = fr_sub.add_parser("mu", help="mu(gamma) curve")
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--gamma-min", type=float)
    p.add_argument("--gamma-max", type=float)
    p.add_argument("--gamma-count", type=int, default=25)
    p.set_defaults(fn=cmd_freidlin_mu)
    p = fr_sub.add_parser("speed", help="w* by gamma/mu minimization")
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(fn=cmd_freidlin_speed)

    p_var = sub.add_parser("variational", help="drift-field optimization")
    var_sub = p_var.add_subparsers(dest="subcommand", required=True)
    p = var_sub.add_parser("minimize", help="minimize k_0(a, c + a(p+theta)^2)")
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--p", type=float)
    p.add_argument("--max-iters", type=int, default=300)
    p.set_defaults(fn=cmd_variational_minimize)

    p_pde = sub.add_parser("pde", help="direct front simulation")
    pde_sub = p_pde.add_subparsers(dest="subcommand", required=True)
    p = pde_sub.add_parser("run", help="integrate and record the front trace")
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(fn=cmd_pde_run)
    p = pde_sub.add_parser("speed", help="fitted front speed")
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(fn=cmd_pde_speed)
    p = pde_sub.add_parser("dichotomy", help="probe u at (1 +- delta) w* T")
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--w-star", type=float)
    p.add_argument("--T", type=float, default=150.0)
    p.add_argument("--deltas", type=float, nargs="+", default=[0.25])
    p.set_defaults(fn=cmd_pde_dichotomy)

    p = sub.add_parser("suite", help="run a verification suite")
    p.add_argument("name", choices=sorted(lab.SUITES))
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("report", help="summarize a previous run directory")
    p.add_argument("run_id", help="run directory containing manifest.json")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ops.NoConvergence, ops.PositivityViolation, fr.GammaBelowThreshold,
            fr.StepTooCoarse, pde.CFLViolation, pde.FrontEscaped,
            var.NoConvergence, var.DegenerateTilt, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
