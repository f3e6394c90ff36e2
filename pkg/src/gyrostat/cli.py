"""Command-line scenario runner for the reduced rotor systems.

Subcommands
-----------
simulate          integrate the configured system and write
                  ``trajectory.csv`` plus ``drift_summary.txt``; exit 0
                  iff every tracked invariant stays within its drift bound
hj-check          evaluate the configured one-form section and write
                  ``hj_report.txt`` (per-sample table) plus
                  ``hj_report.kv`` (flat key-value aggregate); exit 0 iff
                  no sample is classified INCONSISTENT
equivalence-demo  integrate the matching-controlled system against its
                  target and write ``equivalence.txt``; exit 0 iff the
                  engaged deviation is within the equivalence tolerance
bracket-verify    run the bracket axiom suites and write
                  ``bracket_report.txt``; exit 0 iff every suite passes

Exit codes: 0 success; 1 a runtime check failed (drift bound, deviation,
inconsistent sample, axiom suite, blow-up); 2 bad configuration or
arguments; 3 the section left its momentum level set; 4 the section
failed the closedness gate.

``trajectory.csv`` columns, in order: ``t``, the state components
``pi_1 pi_2 pi_3`` (``gamma_1 gamma_2 gamma_3`` for the heavy-top
kinds), ``theta_1..k`` and ``l_1..k`` for the rotor slots the state
carries, then one column per tracked invariant: ``energy``, then the
Casimirs (``pi_sq``, or ``pi_dot_gamma`` and ``gamma_sq``). Numbers are
written with shortest round-trip precision.

Every command is a deterministic function of the scenario file and the
seed, so reruns are byte-identical; output files are written to a
temporary name and renamed into place.
"""

from __future__ import annotations

import argparse
import os
import sys as _sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import hamilton_jacobi as hj
from . import lie
from .controlled import dynamical_field
from .integrate import run, standard_invariants
from .poisson import AXIOM_BOUNDS, axiom_suite_passes, bracket_axiom_suite

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_MEMBERSHIP = 3
EXIT_GATE = 4

SUITES = ("so3_lie_poisson", "so3_product", "se3_product")
AXIOMS = ("antisymmetry", "leibniz", "jacobi", "casimir")


def _write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _effective_seed(args, cfg: cfgmod.ScenarioConfig | None) -> int:
    if args.seed is not None:
        return args.seed
    return cfg.run["seed"] if cfg is not None else 0


def _say(args, msg: str):
    if not args.quiet:
        print(msg)


def _complain(msg: str):
    print(msg, file=_sys.stderr)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _state_columns(p0) -> list:
    names = ["pi_1", "pi_2", "pi_3"]
    if p0.kind == lie.SE3:
        names += ["gamma_1", "gamma_2", "gamma_3"]
    names += [f"theta_{i}" for i in range(1, p0.n_theta + 1)]
    names += [f"l_{i}" for i in range(1, p0.n_l + 1)]
    return names


def _trajectory_csv(traj, invariants: dict) -> str:
    header = ["t"] + _state_columns(traj.states[0]) + list(invariants)
    lines = [",".join(header)]
    for t, state in zip(traj.times, traj.states):
        row = [float(t)] + [float(v) for v in state.flat()]
        row += [float(fn(state)) for fn in invariants.values()]
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def _drift_bound(name: str, tolerances: dict) -> float:
    return tolerances["energy_drift"] if name == "energy" \
        else tolerances["casimir_drift"]


def cmd_simulate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    out = _out_dir(args)
    system = cfgmod.build_system(cfg)
    p0 = cfgmod.build_initial(cfg)
    invariants = standard_invariants(system.hamiltonian, system.kind)
    try:
        traj = run(lambda p: dynamical_field(system, p), p0,
                   cfg.run["dt"], cfg.run["t_final"], invariants)
    except ValueError as exc:
        _complain(f"simulation failed: {exc}")
        return EXIT_RUNTIME
    _write_text(out / "trajectory.csv", _trajectory_csv(traj, invariants))

    ok = True
    lines = [f"run: dt = {cfg.run['dt']!r}, t_final = "
             f"{cfg.run['t_final']!r}, steps = {traj.times.size - 1}"]
    for name in invariants:
        worst = traj.max_drift(name)
        bound = _drift_bound(name, cfg.tolerances)
        passed = worst <= bound
        ok = ok and passed
        lines.append(f"{name}: max relative drift {worst:.6e} "
                     f"(bound {bound:g}) {'pass' if passed else 'fail'}")
    lines.append(f"overall: {'pass' if ok else 'fail'}")
    _write_text(out / "drift_summary.txt", "\n".join(lines) + "\n")
    _say(args, f"wrote {out / 'trajectory.csv'} and "
               f"{out / 'drift_summary.txt'}")
    if not ok:
        _complain("drift bounds violated; see drift_summary.txt")
    return EXIT_OK if ok else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# hj-check
# ---------------------------------------------------------------------------

def _kv_text(pairs) -> str:
    return "".join(f"{key} = {value}\n" for key, value in pairs)


def _hj_failure_reports(out: Path, section, mu, verdict: str, message: str,
                        defect: float):
    body = [f"section family: {section.family}",
            f"momentum level: {_vec_text(mu.flat())}",
            f"verdict: {verdict}",
            f"error: {message}"]
    _write_text(out / "hj_report.txt", "\n".join(body) + "\n")
    _write_text(out / "hj_report.kv",
                _kv_text([("closedness_defect", repr(float(defect))),
                          ("verdict", verdict),
                          ("error", message)]))


def _vec_text(arr) -> str:
    return " ".join(repr(float(v)) for v in arr)


def cmd_hj_check(args) -> int:
    cfg = cfgmod.load_config(args.config)
    if cfg.control["kind"] == "matching":
        raise cfgmod.ConfigError("[control] kind: the residual check "
                                 "supports none or constant controls")
    out = _out_dir(args)
    section, mu = cfgmod.build_section(cfg)
    system = cfgmod.build_system(cfg)
    rng = np.random.default_rng(_effective_seed(args, cfg))
    samples = cfgmod.sample_configurations(cfg, mu, rng)
    try:
        probe = hj.theorem_equivalence_probe(system, section, samples,
                                             mu=mu)
    except hj.GateRejection as exc:
        defect = hj.closedness_defect(section, samples=samples)
        _hj_failure_reports(out, section, mu, "GATE_REJECTED", str(exc),
                            defect)
        _complain(f"hj-check rejected: {exc}")
        return EXIT_GATE
    except hj.MembershipError as exc:
        defect = hj.closedness_defect(section, samples=samples)
        _hj_failure_reports(out, section, mu, "MEMBERSHIP_VIOLATION",
                            str(exc), defect)
        _complain(f"hj-check rejected: {exc}")
        return EXIT_MEMBERSHIP

    rel = [s.relatedness for s in probe.samples]
    res = [s.hj for s in probe.samples]
    report = hj.ResidualReport(probe.gate_defect, max(rel), max(res),
                               len(probe.samples), int(np.argmax(rel)),
                               int(np.argmax(res)))

    lines = [f"section family: {section.family}",
             f"momentum level: {_vec_text(mu.flat())}",
             f"samples: {report.sample_count}",
             f"closedness defect: {report.closedness_defect:.6e} "
             f"(gate {hj.GATE_TOL:g})",
             "",
             f"{'idx':>5}  {'relatedness':>13}  {'hj residual':>13}  "
             f"{'|X_gamma|':>11}  class"]
    for i, s in enumerate(probe.samples):
        lines.append(f"{i:5d}  {s.relatedness:13.6e}  {s.hj:13.6e}  "
                     f"{s.x_norm:11.4e}  {s.label}")
    lines += ["", f"verdict: {probe.verdict}"]
    _write_text(out / "hj_report.txt", "\n".join(lines) + "\n")

    kv = [("closedness_defect", repr(report.closedness_defect)),
          ("relatedness_residual", repr(report.relatedness_residual)),
          ("hj_residual", repr(report.hj_residual)),
          ("sample_count", report.sample_count),
          ("worst_relatedness_index", report.worst_relatedness_index),
          ("worst_hj_index", report.worst_hj_index),
          ("verdict", probe.verdict)]
    _write_text(out / "hj_report.kv", _kv_text(kv))

    _say(args, f"wrote {out / 'hj_report.txt'} and {out / 'hj_report.kv'}")
    _say(args, f"verdict: {probe.verdict}")
    inconsistent = any(s.label == "INCONSISTENT" for s in probe.samples)
    if inconsistent:
        _complain("residuals disagree on at least one sample; "
                  "see hj_report.txt")
    return EXIT_RUNTIME if inconsistent else EXIT_OK


# ---------------------------------------------------------------------------
# equivalence-demo
# ---------------------------------------------------------------------------

def _max_deviation(traj_a, traj_b) -> float:
    worst = 0.0
    for a, b in zip(traj_a.states, traj_b.states):
        worst = max(worst, float(np.max(np.abs(a.flat() - b.flat()))))
    return worst


def cmd_equivalence_demo(args) -> int:
    cfg = cfgmod.load_config(args.config)
    out = _out_dir(args)
    control, target_system, to_target = cfgmod.build_matching(cfg)
    engaged_system = cfgmod.build_system(cfg)
    free_system = cfgmod.base_system(cfg)
    p0 = cfgmod.build_initial(cfg)
    q0 = to_target(p0)
    dt, t_final = cfg.run["dt"], cfg.run["t_final"]
    try:
        target_traj = run(lambda p: dynamical_field(target_system, p),
                          q0, dt, t_final)
        engaged_traj = run(lambda p: dynamical_field(engaged_system, p),
                           p0, dt, t_final)
        free_traj = run(lambda p: dynamical_field(free_system, p),
                        p0, dt, t_final)
    except ValueError as exc:
        _complain(f"equivalence demo failed: {exc}")
        return EXIT_RUNTIME

    engaged = _max_deviation(engaged_traj, target_traj)
    disengaged = _max_deviation(free_traj, target_traj)
    tol = cfg.tolerances["equivalence"]
    ok = engaged <= tol
    kv = [("target", cfg.control["target"]),
          ("dt", repr(dt)),
          ("t_final", repr(t_final)),
          ("engaged_deviation", repr(engaged)),
          ("disengaged_deviation", repr(disengaged)),
          ("tolerance", repr(tol)),
          ("engaged_within_tolerance", "yes" if ok else "no")]
    _write_text(out / "equivalence.txt", _kv_text(kv))
    _say(args, f"wrote {out / 'equivalence.txt'}")
    _say(args, f"engaged deviation {engaged:.6e}, disengaged "
               f"{disengaged:.6e} (tolerance {tol:g})")
    if not ok:
        _complain(f"matched trajectories deviate by {engaged:.6e} "
                  f"(tolerance {tol:g})")
    return EXIT_OK if ok else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# bracket-verify
# ---------------------------------------------------------------------------

def cmd_bracket_verify(args) -> int:
    cfg = cfgmod.load_config(args.config) if args.config else None
    out = _out_dir(args)
    seed = _effective_seed(args, cfg)
    lines = []
    all_ok = True
    for name in SUITES:
        report = bracket_axiom_suite(name, n_instances=1000, seed=seed,
                                     inject_error=args.inject_sign_error)
        passed = axiom_suite_passes(report)
        all_ok = all_ok and passed
        lines.append(f"suite {name}: instances = {report['instances']}, "
                     f"seed = {report['seed']}")
        for axiom in AXIOMS:
            bound = AXIOM_BOUNDS[f"max_{axiom}"]
            lines.append(f"  {axiom}: max {report[f'max_{axiom}']:.6e} "
                         f"(bound {bound:g}, worst sample "
                         f"{report[f'worst_{axiom}_sample']})")
        lines.append(f"  result: {'pass' if passed else 'fail'}")
    lines.append(f"overall: {'pass' if all_ok else 'fail'}")
    _write_text(out / "bracket_report.txt", "\n".join(lines) + "\n")
    _say(args, f"wrote {out / 'bracket_report.txt'}")
    if not all_ok:
        _complain("bracket axiom suite failed; see bracket_report.txt")
    return EXIT_OK if all_ok else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_EPILOG = """\
trajectory.csv column order: t, then the state components
pi_1 pi_2 pi_3 [gamma_1 gamma_2 gamma_3] theta_1..k l_1..k
(slots the state carries), then the invariant columns: energy, then
pi_sq (rigid body) or pi_dot_gamma and gamma_sq (heavy-top kinds).

exit codes: 0 success; 1 runtime check failed; 2 bad configuration;
3 momentum-level membership violation; 4 closedness gate rejection.
"""


def _add_common(sp, config_required: bool = True):
    sp.add_argument("--config", required=config_required, default=None,
                    help="scenario file (INI; see the config module)")
    sp.add_argument("--out", default="./out",
                    help="output directory (default ./out)")
    sp.add_argument("--seed", type=int, default=None,
                    help="sampling seed; overrides [run] seed (default 0)")
    sp.add_argument("--quiet", action="store_true",
                    help="suppress success chatter on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gyrostat",
        description="Scenario runner for reduced rigid-body and "
                    "heavy-top rotor systems.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate",
                        help="integrate the configured system and check "
                             "invariant drift",
                        epilog=_EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("hj-check",
                        help="closedness gate plus relatedness and "
                             "Hamilton-Jacobi residuals for the "
                             "configured section")
    _add_common(sp)
    sp.set_defaults(func=cmd_hj_check)

    sp = sub.add_parser("equivalence-demo",
                        help="run the matching control against its "
                             "target and report trajectory deviation")
    _add_common(sp)
    sp.set_defaults(func=cmd_equivalence_demo)

    sp = sub.add_parser("bracket-verify",
                        help="run the Poisson bracket axiom suites")
    _add_common(sp, config_required=False)
    sp.add_argument("--inject-sign-error", action="store_true",
                    help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_bracket_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except cfgmod.ConfigError as exc:
        _complain(f"config error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
