"""Command-line interface: simulate | ensemble | purity | validate.

Data goes out as CSV (shortest round-trip float text, '.' decimal point,
fixed column order) with a JSON manifest sidecar holding everything needed
to reproduce the run bit-exactly: the full scenario echo, effective seed,
package version and backend.

Exit codes: 0 success, 1 failed validation checks, 2 invalid
configuration/usage, 3 trajectory divergence.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import ConfigError, load_scenario, scenario_to_dict
from .engine import IntegratorConfig
from .ensemble import (Scenario, run_ensemble, run_me_trajectory,
                       run_trajectory)
from .exceptions import DivergenceError, QubitSMEError
from .fields import CatStateInput, SinglePhotonInput, VacuumInput
from .operators import SystemTriple
from .purity import purity_rate_qubit_hd, purity_rate_qubit_me
from .scenarios import builtin_names, builtin_scenario
from .validate import CHECKS, run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _fmt(v) -> str:
    return repr(float(v))


def write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in range(rows):
            fh.write(",".join(_fmt(col[r]) for col in columns) + "\n")


def _git_describe():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=Path(__file__).resolve().parent)
        return out.stdout.strip() or None
    except Exception:
        return None


def write_manifest(out_path, command, scenario, columns, extra=None):
    manifest = {
        "schema_version": "1",
        "package_version": __version__,
        "command": command,
        "scenario": scenario_to_dict(scenario),
        "effective_seed": scenario.integrator.seed,
        "backend": kernels.backend_name(),
        "git_describe": _git_describe(),
        "output": Path(out_path).name,
        "columns": columns,
    }
    if extra:
        manifest.update(extra)
    side = Path(str(out_path) + ".manifest.json")
    side.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _block_labels(inp):
    if isinstance(inp, SinglePhotonInput):
        return ["b11", "b10", "b00"]
    if isinstance(inp, CatStateInput):
        n = inp.n_branches
        return [f"b{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return []


def trajectory_columns(record, scenario):
    """CSV header and columns for one trajectory record."""
    inp = scenario.field_input
    from .filters import physical_bloch
    noise_name = "dW" if scenario.detection == "homodyne" else "dN"
    header = ["t", "x", "y", "z"]
    bloch = np.array([physical_bloch(s, inp) for s in record.states])
    columns = [record.times, bloch[:, 0], bloch[:, 1], bloch[:, 2]]
    if isinstance(inp, (SinglePhotonInput, CatStateInput)):
        flat = record.states.reshape(len(record.times), -1, 4)
        for b, label in enumerate(_block_labels(inp)):
            for q, comp in enumerate("cxyz"):
                header.append(f"{label}_{comp}_re")
                columns.append(flat[:, b, q].real)
                header.append(f"{label}_{comp}_im")
                columns.append(flat[:, b, q].imag)
    header += [noise_name, "Y", "P"]
    columns += [record.innovations, record.Y, record.purity]
    return header, columns


def _scenario_from_args(args) -> Scenario:
    if bool(args.config) == bool(args.scenario):
        raise ConfigError("exactly one of --config or --scenario is required")
    if args.config:
        scenario = load_scenario(args.config)
    else:
        try:
            scenario = builtin_scenario(args.scenario)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    if args.seed is not None or getattr(args, "trajectories", None):
        cfg = scenario.integrator
        new_cfg = IntegratorConfig(
            dt=cfg.dt, t_final=cfg.t_final,
            seed=cfg.seed if args.seed is None else args.seed,
            record_stride=cfg.record_stride)
        n = getattr(args, "trajectories", None) or scenario.n_trajectories
        scenario = Scenario(
            name=scenario.name, field_input=scenario.field_input,
            detection=scenario.detection, gamma=scenario.gamma,
            omega=scenario.omega, initial_bloch=scenario.initial_bloch,
            integrator=new_cfg, n_trajectories=n)
    return scenario


def cmd_simulate(args) -> int:
    scenario = _scenario_from_args(args)
    record = run_trajectory(scenario, index=0)
    header, columns = trajectory_columns(record, scenario)
    write_csv(args.out, header, columns)
    write_manifest(args.out, "simulate", scenario, header)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    scenario = _scenario_from_args(args)
    result = run_ensemble(scenario)
    header = ["t"]
    columns = [result.times]
    for name in result.mean:
        header += [f"mean_{name}", f"se_{name}", f"me_{name}"]
        columns += [result.mean[name], result.se[name], result.me[name]]
    header += ["mean_P", "se_P", "me_P"]
    columns += [result.purity_mean, result.purity_se, result.purity_me]
    write_csv(args.out, header, columns)
    extra = {"metrics": result.metrics,
             "n_trajectories": result.n_trajectories,
             "failed_indices": result.failed_indices,
             "diagnostics": {k: v for k, v in result.diagnostics.items()}}
    write_manifest(args.out, "ensemble", scenario, header, extra)
    if args.dump_trajectories:
        _dump_trajectories(args, scenario)
    return EXIT_OK


def _dump_trajectories(args, scenario):
    from .filters import physical_bloch
    path = Path(str(args.out) + ".trajectories.csv")
    inp = scenario.field_input
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("trajectory,t,x,y,z,P\n")
        for i in range(scenario.n_trajectories):
            rec = run_trajectory(scenario, index=i)
            for r, t in enumerate(rec.times):
                b = physical_bloch(rec.states[r], inp)
                fh.write(",".join([str(i), _fmt(t), _fmt(b[0]), _fmt(b[1]),
                                   _fmt(b[2]), _fmt(rec.purity[r])]) + "\n")


def cmd_purity(args) -> int:
    scenario = _scenario_from_args(args)
    result = run_ensemble(scenario)
    me_rec = run_me_trajectory(scenario)
    G = SystemTriple.two_level(scenario.gamma, scenario.omega)
    inp = scenario.field_input
    rate_me = np.array([purity_rate_qubit_me(s, inp, G, t)
                        for s, t in zip(me_rec.states, me_rec.times)])
    header = ["t", "me_P", "mean_P", "se_P", "me_rate"]
    columns = [result.times, result.purity_me, result.purity_mean,
               result.purity_se, rate_me]
    if scenario.detection == "homodyne":
        rate_hd = np.array([purity_rate_qubit_hd(s, inp, G, t)
                            for s, t in zip(me_rec.states, me_rec.times)])
        header.append("hd_rate_at_me_state")
        columns.append(rate_hd)
    write_csv(args.out, header, columns)
    write_manifest(args.out, "purity", scenario, header)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.list:
        for name in CHECKS:
            print(name)
        return EXIT_OK
    results = run_checks()
    width = max(len(r["name"]) for r in results)
    failed = 0
    for r in results:
        mark = "PASS" if r["passed"] else "FAIL"
        if not r["passed"]:
            failed += 1
        print(f"{r['name']:<{width}}  {mark}  max_dev={r['max_dev']:.3e}  "
              f"({r['detail']})")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubitsme",
        description="Conditioned/unconditioned two-level system dynamics "
                    "for vacuum, single-photon and cat-state inputs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_out=True):
        p.add_argument("--config", help="scenario config JSON path")
        p.add_argument("--scenario",
                       help="built-in scenario name: "
                            + ", ".join(builtin_names()))
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        if needs_out:
            p.add_argument("--out", required=True, help="output CSV path")

    p_sim = sub.add_parser("simulate", help="one conditioned trajectory")
    add_io(p_sim)
    p_sim.set_defaults(fn=cmd_simulate)

    p_ens = sub.add_parser("ensemble",
                           help="trajectory ensemble vs master equation")
    add_io(p_ens)
    p_ens.add_argument("--trajectories", type=int, default=None,
                       help="override the ensemble size")
    p_ens.add_argument("--dump-trajectories", action="store_true",
                       help="also write per-trajectory observables")
    p_ens.set_defaults(fn=cmd_ensemble)

    p_pur = sub.add_parser("purity",
                           help="conditioned vs unconditioned purity")
    add_io(p_pur)
    p_pur.add_argument("--trajectories", type=int, default=None)
    p_pur.set_defaults(fn=cmd_purity)

    p_val = sub.add_parser("validate", help="run the release checks")
    p_val.add_argument("--list", action="store_true",
                       help="list check names without running")
    p_val.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except QubitSMEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
