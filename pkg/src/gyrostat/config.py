"""Scenario files for the command-line runner.

A scenario is an INI file with up to seven sections; section and key
names are part of the interface. Vectors are whitespace-separated
numbers; ``;`` and ``#`` open comments, inline ones included.

[system]    kind = rigid_body_rotors | heavy_top_rotors | heavy_top_free
[params]    rigid_body_rotors:  ibar (3), j (3)
            heavy_top_rotors:   ibar (3), j (2), m, g, h, chi (3)
            heavy_top_free:     i (3), m, g, h, chi (3)
[initial]   pi (3); gamma (3, the two heavy-top kinds only);
            theta, l (rotor slots, optional, default zeros)
[run]       dt (default 0.001), t_final (default 10.0), seed (default 0)
[gamma]     kind = zero | exact_dW | constant_body | explicit
            exact_dW:      name = rotor_quadratic
            constant_body: nu0 (3 or 6), l0 (rotor slots, optional)
            explicit:      components (body covector then rotor
                           momenta); theta_coupling (k*k numbers,
                           row-major, optional) makes the rotor momenta
                           affine in the angles, l = l0 + C theta, which
                           is closed exactly when C is symmetric
            mu (3 or 6, optional): the declared momentum level,
            defaulting to the section's body components at the identity;
            declaring a different level makes the membership check fail
            samples (default 100); the whole section is optional and
            only the residual-check command requires it
[control]   kind = none | constant | matching (default none)
            constant: d_pi (3), d_gamma (3, heavy-top kinds), d_l
                      (rotor slots), each optional, default zeros
            matching: target = heavy_top_free | rigid_body_rotors plus
                      target_i/target_m/target_g/target_h/target_chi or
                      target_ibar/target_j
[tolerances] energy_drift (1e-8), casimir_drift (1e-8),
             equivalence (1e-6), all strictly positive

Parsing produces a canonical :class:`ScenarioConfig` (tuples of floats,
plain floats, ints) and every validation error names the offending
``[section] key``. :func:`emit_config` writes the canonical form back
out; ``parse_config(emit_config(cfg)) == cfg`` exactly, since floats are
printed with shortest round-trip precision.

The matching control runs the rigid body with rotors as the controlled
side and identifies its angle-free (pi, l) subsystem with the target's
(pi, gamma) reduced space, so a matching scenario must keep ``theta``
at zero. The builders at the bottom turn a validated config into the
package's parameter sets, systems, initial points, one-form sections
and sample batches.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

import numpy as np

from . import lie
from .controlled import RCHSystem, matching_control
from .hamilton_jacobi import (Configuration, OneFormSection,
                              affine_rotor_section, constant_body_section,
                              isotropy_configurations,
                              rotor_quadratic_section, zero_section)
from .poisson import ReducedPoint, ReducedTangent, reduced_point
from .systems import (HeavyTopParams, HeavyTopRotorParams,
                      RigidBodyRotorParams, heavy_top_free_system,
                      heavy_top_system, rigid_body_system)

SYSTEMS = ("rigid_body_rotors", "heavy_top_rotors", "heavy_top_free")
GAMMA_KINDS = ("zero", "exact_dW", "constant_body", "explicit")
CONTROL_KINDS = ("none", "constant", "matching")
MATCHING_TARGETS = ("heavy_top_free", "rigid_body_rotors")
SECTION_BUILTINS = ("rotor_quadratic",)

_SECTIONS = ("system", "params", "initial", "run", "gamma", "control",
             "tolerances")
_PARAM_KEYS = {
    "rigid_body_rotors": ("ibar", "j"),
    "heavy_top_rotors": ("ibar", "j", "m", "g", "h", "chi"),
    "heavy_top_free": ("i", "m", "g", "h", "chi"),
}
_TARGET_KEYS = {
    "heavy_top_free": ("target_i", "target_m", "target_g", "target_h",
                       "target_chi"),
    "rigid_body_rotors": ("target_ibar", "target_j"),
}
_VECTOR_PARAMS = ("ibar", "j", "chi", "i", "target_ibar", "target_j",
                  "target_i", "target_chi")


class ConfigError(ValueError):
    """A scenario file failed validation; the message names the field."""


def algebra_kind(system: str) -> str:
    return lie.SO3 if system == "rigid_body_rotors" else lie.SE3


def rotor_count(system: str) -> int:
    return {"rigid_body_rotors": 3, "heavy_top_rotors": 2,
            "heavy_top_free": 0}[system]


@dataclass(frozen=True)
class ScenarioConfig:
    """Canonical form of a parsed scenario file."""

    system: str
    params: dict
    initial: dict
    run: dict
    gamma: dict | None
    control: dict
    tolerances: dict


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _parse_floats(raw: str, where: str) -> tuple:
    try:
        vals = tuple(float(tok) for tok in raw.split())
    except ValueError:
        raise ConfigError(f"{where}: could not read {raw!r} as numbers") \
            from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{where}: entries must be finite")
    return vals


def _vector(raw: str, n: int, where: str) -> tuple:
    vals = _parse_floats(raw, where)
    if len(vals) != n:
        raise ConfigError(f"{where}: expected {n} numbers, got {len(vals)}")
    return vals


def _scalar(raw: str, where: str) -> float:
    vals = _parse_floats(raw, where)
    if len(vals) != 1:
        raise ConfigError(f"{where}: expected a single number, "
                          f"got {len(vals)}")
    return vals[0]


def _integer(raw: str, where: str) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {raw!r}") \
            from None


def _take(sec: dict, name: str, key: str, required: bool = False):
    if key not in sec:
        if required:
            raise ConfigError(f"[{name}] {key}: missing required key")
        return None
    return sec.pop(key)


def _no_extras(sec: dict, name: str):
    if sec:
        key = sorted(sec)[0]
        raise ConfigError(f"[{name}] {key}: unknown key")


def _parse_system(data: dict) -> str:
    sec = data.get("system")
    if sec is None:
        raise ConfigError("[system] kind: missing required key")
    kind = _take(sec, "system", "kind", required=True)
    if kind not in SYSTEMS:
        raise ConfigError(f"[system] kind: expected one of "
                          f"{', '.join(SYSTEMS)}, got {kind!r}")
    _no_extras(sec, "system")
    return kind


def _parse_params(data: dict, system: str) -> dict:
    sec = data.get("params")
    if sec is None:
        raise ConfigError(f"[params] {_PARAM_KEYS[system][0]}: missing "
                          "required key")
    out = {}
    for key in _PARAM_KEYS[system]:
        raw = _take(sec, "params", key, required=True)
        if key in _VECTOR_PARAMS:
            n = 2 if (key == "j" and system == "heavy_top_rotors") else 3
            out[key] = _vector(raw, n, f"[params] {key}")
        else:
            out[key] = _scalar(raw, f"[params] {key}")
    _no_extras(sec, "params")
    try:
        _params_from(system, out)
    except ValueError as exc:
        raise ConfigError(f"[params] {exc}") from None
    return out


def _parse_initial(data: dict, system: str) -> dict:
    sec = data.get("initial")
    if sec is None:
        raise ConfigError("[initial] pi: missing required key")
    k = rotor_count(system)
    out = {"pi": _vector(_take(sec, "initial", "pi", required=True), 3,
                         "[initial] pi")}
    if algebra_kind(system) == lie.SE3:
        out["gamma"] = _vector(_take(sec, "initial", "gamma", required=True),
                               3, "[initial] gamma")
    for key in ("theta", "l"):
        raw = _take(sec, "initial", key)
        out[key] = (0.0,) * k if raw is None \
            else _vector(raw, k, f"[initial] {key}")
    _no_extras(sec, "initial")
    return out


def _parse_run(data: dict) -> dict:
    sec = data.get("run") or {}
    raw_dt = _take(sec, "run", "dt")
    raw_tf = _take(sec, "run", "t_final")
    raw_seed = _take(sec, "run", "seed")
    dt = 1e-3 if raw_dt is None else _scalar(raw_dt, "[run] dt")
    t_final = 10.0 if raw_tf is None else _scalar(raw_tf, "[run] t_final")
    seed = 0 if raw_seed is None else _integer(raw_seed, "[run] seed")
    _no_extras(sec, "run")
    if dt <= 0:
        raise ConfigError("[run] dt: must be positive")
    if t_final <= 0:
        raise ConfigError("[run] t_final: must be positive")
    n = round(t_final / dt)
    if n < 1 or abs(n * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ConfigError("[run] dt: must divide t_final into whole steps")
    if seed < 0:
        raise ConfigError("[run] seed: must be nonnegative")
    return {"dt": dt, "t_final": t_final, "seed": seed}


def _parse_gamma(data: dict, system: str) -> dict | None:
    sec = data.get("gamma")
    if sec is None:
        return None
    k = rotor_count(system)
    dim = lie.algebra_dim(algebra_kind(system))
    kind = _take(sec, "gamma", "kind", required=True)
    if kind not in GAMMA_KINDS:
        raise ConfigError(f"[gamma] kind: expected one of "
                          f"{', '.join(GAMMA_KINDS)}, got {kind!r}")
    out = {"kind": kind}
    if kind == "exact_dW":
        name = _take(sec, "gamma", "name", required=True)
        if name not in SECTION_BUILTINS:
            raise ConfigError(f"[gamma] name: unknown built-in section "
                              f"{name!r}")
        if k < 1:
            raise ConfigError("[gamma] name: rotor_quadratic needs at "
                              "least one rotor slot")
        out["name"] = name
    elif kind == "constant_body":
        out["nu0"] = _vector(_take(sec, "gamma", "nu0", required=True),
                             dim, "[gamma] nu0")
        raw_l0 = _take(sec, "gamma", "l0")
        out["l0"] = (0.0,) * k if raw_l0 is None \
            else _vector(raw_l0, k, "[gamma] l0")
    elif kind == "explicit":
        out["components"] = _vector(
            _take(sec, "gamma", "components", required=True), dim + k,
            "[gamma] components")
        raw_c = _take(sec, "gamma", "theta_coupling")
        out["theta_coupling"] = (0.0,) * (k * k) if raw_c is None \
            else _vector(raw_c, k * k, "[gamma] theta_coupling")
    raw_mu = _take(sec, "gamma", "mu")
    if raw_mu is None:
        if kind == "constant_body":
            out["mu"] = out["nu0"]
        elif kind == "explicit":
            out["mu"] = out["components"][:dim]
        else:
            out["mu"] = (0.0,) * dim
    else:
        out["mu"] = _vector(raw_mu, dim, "[gamma] mu")
    raw_n = _take(sec, "gamma", "samples")
    out["samples"] = 100 if raw_n is None \
        else _integer(raw_n, "[gamma] samples")
    _no_extras(sec, "gamma")
    if out["samples"] < 1:
        raise ConfigError("[gamma] samples: must be at least 1")
    if algebra_kind(system) == lie.SE3:
        pi, gm = np.array(out["mu"][:3]), np.array(out["mu"][3:6])
        level = np.linalg.norm(np.concatenate([pi, gm]))
        if level > 0 and (np.linalg.norm(gm) == 0.0
                          or np.linalg.norm(np.cross(pi, gm))
                          > 1e-12 * max(1.0, np.linalg.norm(gm))):
            raise ConfigError(
                "[gamma] mu: sampling on a nonzero momentum level needs "
                "pi parallel to gamma (or pi = 0) with gamma nonzero")
    return out


def _parse_control(data: dict, system: str, initial: dict) -> dict:
    sec = data.get("control") or {}
    raw_kind = _take(sec, "control", "kind")
    kind = "none" if raw_kind is None else raw_kind
    if kind not in CONTROL_KINDS:
        raise ConfigError(f"[control] kind: expected one of "
                          f"{', '.join(CONTROL_KINDS)}, got {kind!r}")
    out = {"kind": kind}
    if kind == "constant":
        k = rotor_count(system)
        sizes = {"d_pi": 3, "d_l": k}
        if algebra_kind(system) == lie.SE3:
            sizes["d_gamma"] = 3
        for key in ("d_pi", "d_gamma", "d_l"):
            if key not in sizes:
                continue
            raw = _take(sec, "control", key)
            out[key] = (0.0,) * sizes[key] if raw is None \
                else _vector(raw, sizes[key], f"[control] {key}")
    elif kind == "matching":
        target = _take(sec, "control", "target", required=True)
        if target not in MATCHING_TARGETS:
            raise ConfigError(f"[control] target: expected one of "
                              f"{', '.join(MATCHING_TARGETS)}, "
                              f"got {target!r}")
        if system != "rigid_body_rotors":
            raise ConfigError("[control] target: matching transport runs "
                              "the rigid_body_rotors system against the "
                              "target")
        if any(v != 0.0 for v in initial["theta"]):
            raise ConfigError("[initial] theta: matching transport tracks "
                              "the angle-free subsystem; omit theta or "
                              "set it to zeros")
        out["target"] = target
        tgt = {}
        for key in _TARGET_KEYS[target]:
            raw = _take(sec, "control", key, required=True)
            if key in _VECTOR_PARAMS:
                tgt[key] = _vector(raw, 3, f"[control] {key}")
            else:
                tgt[key] = _scalar(raw, f"[control] {key}")
        out.update(tgt)
        try:
            _target_params(out)
        except ValueError as exc:
            raise ConfigError(f"[control] {exc}") from None
    _no_extras(sec, "control")
    return out


def _parse_tolerances(data: dict) -> dict:
    sec = data.get("tolerances") or {}
    defaults = {"energy_drift": 1e-8, "casimir_drift": 1e-8,
                "equivalence": 1e-6}
    out = {}
    for key, default in defaults.items():
        raw = _take(sec, "tolerances", key)
        out[key] = default if raw is None \
            else _scalar(raw, f"[tolerances] {key}")
        if out[key] <= 0:
            raise ConfigError(f"[tolerances] {key}: must be positive")
    _no_extras(sec, "tolerances")
    return out


def parse_config(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from None
    data = {name: dict(cp[name]) for name in cp.sections()}
    for name in data:
        if name not in _SECTIONS:
            raise ConfigError(f"[{name}]: unknown section")
    system = _parse_system(data)
    params = _parse_params(data, system)
    initial = _parse_initial(data, system)
    run = _parse_run(data)
    gamma = _parse_gamma(data, system)
    control = _parse_control(data, system, initial)
    tolerances = _parse_tolerances(data)
    return ScenarioConfig(system, params, initial, run, gamma, control,
                          tolerances)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: "
                          f"{exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, tuple):
        return " ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: ScenarioConfig) -> str:
    """Write the canonical text form; parse_config inverts it exactly."""
    blocks = [("system", [("kind", cfg.system)])]
    blocks.append(("params", [(k, cfg.params[k])
                              for k in _PARAM_KEYS[cfg.system]]))
    initial_keys = [k for k in ("pi", "gamma", "theta", "l")
                    if k in cfg.initial]
    blocks.append(("initial", [(k, cfg.initial[k]) for k in initial_keys]))
    blocks.append(("run", [(k, cfg.run[k])
                           for k in ("dt", "t_final", "seed")]))
    if cfg.gamma is not None:
        keys = [k for k in ("kind", "name", "nu0", "l0", "components",
                            "theta_coupling", "mu", "samples")
                if k in cfg.gamma]
        blocks.append(("gamma", [(k, cfg.gamma[k]) for k in keys]))
    ctl_keys = ["kind"] + [k for k in ("d_pi", "d_gamma", "d_l", "target",
                                       *_TARGET_KEYS["heavy_top_free"],
                                       *_TARGET_KEYS["rigid_body_rotors"])
                           if k in cfg.control]
    blocks.append(("control", [(k, cfg.control[k]) for k in ctl_keys]))
    blocks.append(("tolerances", [(k, cfg.tolerances[k])
                                  for k in ("energy_drift", "casimir_drift",
                                            "equivalence")]))
    lines = []
    for name, items in blocks:
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {_fmt(value)}" for key, value in items)
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _params_from(system: str, params: dict):
    if system == "rigid_body_rotors":
        return RigidBodyRotorParams(np.array(params["ibar"]),
                                    np.array(params["j"]))
    if system == "heavy_top_rotors":
        return HeavyTopRotorParams(np.array(params["ibar"]),
                                   np.array(params["j"]), params["m"],
                                   params["g"], params["h"],
                                   np.array(params["chi"]))
    return HeavyTopParams(np.array(params["i"]), params["m"], params["g"],
                          params["h"], np.array(params["chi"]))


def _target_params(control: dict):
    if control["target"] == "heavy_top_free":
        return HeavyTopParams(np.array(control["target_i"]),
                              control["target_m"], control["target_g"],
                              control["target_h"],
                              np.array(control["target_chi"]))
    return RigidBodyRotorParams(np.array(control["target_ibar"]),
                                np.array(control["target_j"]))


def build_params(cfg: ScenarioConfig):
    return _params_from(cfg.system, cfg.params)


def base_system(cfg: ScenarioConfig) -> RCHSystem:
    """The declared system without any configured control attached."""
    params = build_params(cfg)
    if cfg.system == "rigid_body_rotors":
        return rigid_body_system(params)
    if cfg.system == "heavy_top_rotors":
        return heavy_top_system(params)
    return heavy_top_free_system(params)


def top_to_rotor_point(p: ReducedPoint) -> ReducedPoint:
    """Identify a heavy-top point (pi, gamma) with the angle-free rotor
    point (pi, l): the advected vector plays the rotor momentum."""
    return ReducedPoint(lie.coalgebra(lie.SO3, p.nu.pi), np.zeros(0),
                        p.nu.gamma.copy())


def rotor_to_top_point(p: ReducedPoint) -> ReducedPoint:
    return ReducedPoint(lie.coalgebra(lie.SE3, p.nu.pi, p.l), np.zeros(0),
                        np.zeros(0))


def top_to_rotor_tangent(v: ReducedTangent) -> ReducedTangent:
    return ReducedTangent(v.d_pi.copy(), None, np.zeros(0),
                          v.d_gamma.copy())


def _identity_point(p: ReducedPoint) -> ReducedPoint:
    return p


def _identity_tangent(v: ReducedTangent) -> ReducedTangent:
    return v


def build_matching(cfg: ScenarioConfig):
    """The matching control for the configured target, plus the target
    system and the point map from controlled points to target points."""
    if cfg.control["kind"] != "matching":
        raise ConfigError("[control] kind: this command needs "
                          "kind = matching")
    sys_a = base_system(cfg)
    if cfg.control["target"] == "heavy_top_free":
        sys_b = heavy_top_free_system(_target_params(cfg.control))
        control = matching_control(sys_a, sys_b, top_to_rotor_point,
                                   top_to_rotor_tangent, rotor_to_top_point)
        return control, sys_b, rotor_to_top_point
    sys_b = rigid_body_system(_target_params(cfg.control))
    control = matching_control(sys_a, sys_b, _identity_point,
                               _identity_tangent, _identity_point)
    return control, sys_b, _identity_point


def _constant_control(cfg: ScenarioConfig):
    d_pi = np.array(cfg.control["d_pi"])
    d_gamma = np.array(cfg.control["d_gamma"]) \
        if "d_gamma" in cfg.control else None
    d_l = np.array(cfg.control["d_l"])

    def control(p: ReducedPoint) -> ReducedTangent:
        return ReducedTangent(d_pi.copy(),
                              None if d_gamma is None else d_gamma.copy(),
                              np.zeros(p.n_theta), d_l.copy())

    return control


def build_system(cfg: ScenarioConfig) -> RCHSystem:
    """The declared system with the configured control installed."""
    sys = base_system(cfg)
    if cfg.control["kind"] == "constant":
        return RCHSystem(sys.hamiltonian, sys.kind, sys.rotor_count,
                         force=sys.force, control=_constant_control(cfg))
    if cfg.control["kind"] == "matching":
        control, _, _ = build_matching(cfg)
        return RCHSystem(sys.hamiltonian, sys.kind, sys.rotor_count,
                         force=sys.force, control=control)
    return sys


def build_initial(cfg: ScenarioConfig) -> ReducedPoint:
    """The configured start point; matching scenarios drop the angle
    slot, since the transport identifies angle-free subsystems."""
    init = cfg.initial
    if cfg.control["kind"] == "matching":
        return reduced_point(lie.SO3, init["pi"], None, (), init["l"])
    return reduced_point(algebra_kind(cfg.system), init["pi"],
                         init.get("gamma"), init["theta"], init["l"])


def build_section(cfg: ScenarioConfig):
    """The configured one-form section and its declared momentum level."""
    if cfg.gamma is None:
        raise ConfigError("[gamma] kind: missing required key")
    kind = algebra_kind(cfg.system)
    k = rotor_count(cfg.system)
    dim = lie.algebra_dim(kind)
    block = cfg.gamma
    if block["kind"] == "zero":
        section = zero_section(kind, k)
    elif block["kind"] == "exact_dW":
        offset = np.zeros(k)
        offset[0] = 3.0
        section = rotor_quadratic_section(kind, offset)
    elif block["kind"] == "constant_body":
        section = constant_body_section(
            lie.coalgebra_from_flat(kind, np.array(block["nu0"])),
            np.array(block["l0"]))
    else:
        comps = np.array(block["components"])
        nu0 = lie.coalgebra_from_flat(kind, comps[:dim])
        coupling = np.array(block["theta_coupling"]).reshape(k, k)
        if np.any(coupling != 0.0):
            section = affine_rotor_section(nu0, comps[dim:], coupling)
        else:
            section = constant_body_section(nu0, comps[dim:])
    mu = lie.coalgebra_from_flat(kind, np.array(block["mu"]))
    return section, mu


def sample_configurations(cfg: ScenarioConfig, mu,
                          rng: np.random.Generator) -> list:
    """Sample batch for residual checks: global over the configuration
    space on the zero level, the momentum's isotropy subgroup otherwise,
    so constant sections sit exactly on their level set."""
    if cfg.gamma is None:
        raise ConfigError("[gamma] kind: missing required key")
    n = cfg.gamma["samples"]
    k = rotor_count(cfg.system)
    kind = algebra_kind(cfg.system)
    if float(np.linalg.norm(mu.flat())) == 0.0:
        return [Configuration(lie.random_group(rng, kind),
                              rng.uniform(-1.0, 1.0, k))
                for _ in range(n)]
    return isotropy_configurations(rng, mu, n, k)
