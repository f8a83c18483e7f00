"""Command-line front end: ``driven-tls {run,sweep,classify} CONFIG``."""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import load_config
from .errors import ConfigError, DrivenTLSError, InternalConsistencyError
from .interaction import InteractionSpec, classify, q2_coefficients
from .oracle import compare, integrate_schrodinger
from .pipeline import prepare, solve
from .propagator import evaluate_U

EXIT_OK = 0
FLOAT_FMT = "%.17g"


def _fmt(x):
    return FLOAT_FMT % x


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def spec_of(cfg):
    return InteractionSpec.monochromatic(cfg.omega, cfg.chi1, cfg.chi2)


def _use_oracle(cfg, t_end, T_omega):
    if cfg.oracle == "off":
        return False, "disabled"
    if t_end > cfg.oracle_window * T_omega:
        return False, f"window exceeds {cfg.oracle_window:g} driving periods"
    return True, None


def _columns(outputs, with_oracle):
    cols = ["t", "t_over_Tomega"]
    if "P" in outputs:
        cols.append("P")
    if "N" in outputs:
        cols.append("N")
    if "U" in outputs:
        cols += ["reU11", "imU11", "reU12", "imU12"]
    if with_oracle:
        cols += ["oracle_P", "oracle_dev"]
    if "bloch" in outputs:
        cols += ["bloch_x", "bloch_y", "bloch_z"]
    return cols


def run_epsilon(cfg, index, out_dir, prepared=None):
    """Solve one coupling and write its time series; returns a summary record."""
    spec = spec_of(cfg)
    eps = cfg.epsilons[index]
    sol = solve(spec, eps, order=cfg.order, modes=cfg.mode_cutoff, prepared=prepared)
    model = sol.model
    T_omega = model.period
    T_Omega = model.secular_period
    t_end = cfg.t_end.resolve(T_omega, T_Omega)
    if not np.isfinite(t_end):
        raise ConfigError("t_end in secular periods is infinite for Omega = 0")
    t = np.linspace(0.0, t_end, cfg.samples)
    U = evaluate_U(model, t)
    P = np.abs(U[:, 0, 1]) ** 2
    N = np.abs(U[:, 0, 0]) ** 2 + P - 1.0
    maxN = float(np.max(np.abs(N)))
    if np.any(P < 0) or np.any(P > 1.0 + 10.0 * maxN + 1e-15):
        raise InternalConsistencyError("P(t) left [0, 1 + 10 max|N|]", max_P=float(P.max()))

    use_oracle, why_not = _use_oracle(cfg, t_end, T_omega)
    oracle_P = oracle_dev = None
    record = {
        "epsilon": eps,
        "condition": sol.condition.tag,
        "table_label": sol.condition.table_label,
        "Omega": model.Omega,
        "T_Omega": T_Omega,
        "T_Omega_over_T_omega": T_Omega / T_omega,
        "max_abs_N": maxN,
        "order": sol.expansion.order,
        "parameter": sol.expansion.parameter,
        "modes": cfg.mode_cutoff,
        "t_end": t_end,
    }
    if use_oracle:
        traj = integrate_schrodinger(spec, eps, t)
        rep = compare(model, traj)
        oracle_P = traj.P
        oracle_dev = np.max(np.abs(U - traj.U), axis=(1, 2))
        record["oracle"] = {
            "sup_matrix_dev": rep["sup_matrix_dev"],
            "sup_P_dev": rep["sup_P_dev"],
            "max_abs_det_drift": float(np.max(np.abs(traj.unitarity_log))),
        }
    else:
        record["oracle"] = {"skipped": why_not}

    cols = _columns(cfg.outputs, use_oracle)
    data = {"t": t, "t_over_Tomega": t / T_Omega, "P": P, "N": N}
    data.update(
        reU11=U[:, 0, 0].real, imU11=U[:, 0, 0].imag,
        reU12=U[:, 0, 1].real, imU12=U[:, 0, 1].imag,
    )
    if use_oracle:
        data.update(oracle_P=oracle_P, oracle_dev=oracle_dev)
    if "bloch" in cfg.outputs:
        # psi(t) = U(t) |up>
        a, b = U[:, 0, 0], U[:, 1, 0]
        data.update(
            bloch_x=2.0 * (np.conj(a) * b).real,
            bloch_y=2.0 * (np.conj(a) * b).imag,
            bloch_z=np.abs(a) ** 2 - np.abs(b) ** 2,
        )
    name = f"series_{index:03d}.csv"
    with open(os.path.join(out_dir, name), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in zip(*(data[c] for c in cols)):
            w.writerow([_fmt(x) for x in row])
    record["series_file"] = name
    return record


def _apply_flags(cfg, args):
    kw = {}
    if args.order is not None:
        kw["order"] = args.order
    if args.modes is not None:
        kw["mode_cutoff"] = args.modes
    if args.oracle is not None:
        kw["oracle"] = args.oracle
    return cfg.replace(**kw) if kw else cfg


def _config_echo(cfg):
    return {
        "omega": cfg.omega,
        "chi1": cfg.chi1,
        "chi1_text": cfg.chi1_text,
        "chi2": cfg.chi2,
        "epsilons": list(cfg.epsilons),
        "order": cfg.order,
        "mode_cutoff": cfg.mode_cutoff,
        "t_end": {"value": cfg.t_end.value, "unit": cfg.t_end.unit},
        "samples": cfg.samples,
        "oracle": cfg.oracle,
    }


def _sweep_worker(payload):
    cfg, index, out_dir = payload
    try:
        return run_epsilon(cfg, index, out_dir)
    except DrivenTLSError as exc:
        return {"epsilon": cfg.epsilons[index], "error": exc.record()}


def cmd_run(cfg, out_dir):
    spec = spec_of(cfg)
    prepared = prepare(spec, cfg.order, cfg.mode_cutoff)
    records = [run_epsilon(cfg, i, out_dir, prepared) for i in range(len(cfg.epsilons))]
    if "omega_summary" in cfg.outputs:
        _dump({"config": _config_echo(cfg), "runs": records}, os.path.join(out_dir, "summary.json"))
    for r in records:
        print(
            f"eps={r['epsilon']:g} condition={r['condition']} Omega={r['Omega']:.10g} "
            f"T_Omega/T_omega={r['T_Omega_over_T_omega']:.6g} max|N|={r['max_abs_N']:.3e}"
        )
    return EXIT_OK


def cmd_sweep(cfg, out_dir, jobs=1):
    tasks = [(cfg, i, out_dir) for i in range(len(cfg.epsilons))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sweep_worker, tasks))
    else:
        records = [_sweep_worker(t) for t in tasks]
    _dump({"config": _config_echo(cfg), "runs": records}, os.path.join(out_dir, "summary.json"))
    with open(os.path.join(out_dir, "sweep.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epsilon", "condition", "Omega", "T_Omega_over_T_omega", "max_abs_N", "error"])
        for r in records:
            if "error" in r:
                w.writerow([_fmt(r["epsilon"]), "", "", "", "", r["error"]["error"]])
            else:
                w.writerow([
                    _fmt(r["epsilon"]), r["condition"], _fmt(r["Omega"]),
                    _fmt(r["T_Omega_over_T_omega"]), _fmt(r["max_abs_N"]), "",
                ])
    for r in records:
        if "error" in r:
            print(f"eps={r['epsilon']:g} FAILED {r['error']['error']}: {r['error']['message']}")
        else:
            print(f"eps={r['epsilon']:g} T_Omega/T_omega={r['T_Omega_over_T_omega']:.6g} max|N|={r['max_abs_N']:.3e}")
    failed = [r for r in records if "error" in r]
    if failed and len(failed) == len(records):
        return failed[0]["error"]["exit_code"]
    return EXIT_OK


def cmd_classify(cfg):
    spec = spec_of(cfg)
    cond = classify(spec, q2_coefficients(spec, modes=cfg.mode_cutoff))
    report = {
        "condition": cond.tag,
        "table_label": cond.table_label,
        "F0_is_zero": cond.f0_is_zero,
        "diagnostics": cond.diagnostics(),
    }
    print(json.dumps(_jsonable(report), sort_keys=True))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="driven-tls",
        description="Secular-free perturbative propagator of a periodically driven two-level system.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "solve every coupling in the config and write time series"),
        ("sweep", "like run, but per-coupling failures are recorded and skipped"),
        ("classify", "print the condition tag and mean-value diagnostics"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("config")
        s.add_argument("--order", type=int)
        s.add_argument("--modes", type=int, help="Fourier cutoff M (modes -M..M)")
        s.add_argument("--oracle", choices=("on", "off"))
        s.add_argument("--out-dir", default=".")
        if name == "sweep":
            s.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_flags(load_config(args.config), args)
        if args.command == "classify":
            return cmd_classify(cfg)
        os.makedirs(args.out_dir, exist_ok=True)
        if args.command == "run":
            return cmd_run(cfg, args.out_dir)
        return cmd_sweep(cfg, args.out_dir, max(1, args.jobs))
    except DrivenTLSError as exc:
        rec = exc.record()
        print(json.dumps(rec, sort_keys=True), file=sys.stderr)
        if args.command != "classify" and os.path.isdir(args.out_dir):
            _dump(rec, os.path.join(args.out_dir, "error.json"))
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
