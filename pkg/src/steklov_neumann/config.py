"""Experiment configuration: INI files with typed, validated sections.

Example::

    [domain]
    kind = eccentric
    R1 = 1
    R2 = 2

    [solver]
    N = 24

    [grid]
    values = 0, 0.1, 0.2

Unknown sections and keys are rejected. Every field is checked, and the
domain is built, before any solve runs.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .geometry import (AnnulusSpec, EccentricCircle, PolarCurve, StarPolarCurve, annulus_domain, build_domain,
                       build_simply_connected)
from .solver import MODES, SolverOptions

COMMANDS = ("exact", "solve", "sweep", "lemmas", "nodal", "dumbbell", "sandwich", "isoperimetric")
ENV_THREADS = "STEKLOV_NEUMANN_THREADS"
ENV_TAU_M = "STEKLOV_NEUMANN_TAU_M"
ENV_TAU_0 = "STEKLOV_NEUMANN_TAU_0"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> tuple:
    items = [t for t in s.replace("\n", ",").split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(t) for t in items)


def _ints(s: str) -> tuple:
    return tuple(int(v) for v in (t.strip() for t in s.replace("\n", ",").split(",")) if v)


def _choice(*options) -> Callable:
    def conv(s: str) -> str:
        v = s.strip()
        if v not in options:
            raise ValueError(f"expected one of {options}, got {v!r}")
        return v

    return conv


# section -> key -> (converter, default); default None means optional/absent
SCHEMA: dict[str, dict[str, tuple]] = {
    "domain": {
        "kind": (_choice("concentric", "eccentric", "star"), None),
        "n": (int, 2),
        "R1": (float, None),
        "R2": (float, None),
        "d": (float, 0.0),
        "rho_coefficients": (_floats, None),
        "m_out": (int, None),
        "m_in": (int, None),
        "center": (_floats, (0.0, 0.0)),
    },
    "solver": {
        "N": (int, 24),
        "tau_M": (float, 1e-12),
        "tau_0": (float, 1e-8),
        "mode": (_choice(*MODES), "steklov_neumann"),
        "cluster_rtol": (float, 1e-8),
        "flux_threshold": (float, 1e-6),
        "conformal": (_bool, True),
        "modes": (int, 8),
    },
    "grid": {
        "values": (_floats, None),
        "start": (float, None),
        "stop": (float, None),
        "num": (int, None),
    },
    "sweep": {"kind": (_choice("eccentricity", "hole_shrink"), "eccentricity")},
    "exact": {"max_l": (int, 8)},
    "lemmas": {"nodes": (int, 256)},
    "nodal": {
        "resolutions": (_ints, (256, 512, 1024)),
        "random": (int, 10),
        "seed": (int, 0),
        "zero_tol": (float, 1e-6),
    },
    "dumbbell": {"R1": (float, 0.5), "nodes": (int, 64)},
    "isoperimetric": {
        "constraint": (_choice("measure", "perimeter", "both"), "both"),
        "smallness": (float, 0.05),
    },
    "assertions": {"enabled": (_bool, True)},
    "output": {"plot": (_bool, True), "name": (str, None)},
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    sections: dict
    domain_spec: dict
    solver: SolverOptions
    grid: tuple
    threads: int
    assertions: bool
    plot: bool
    name: str
    source: str = ""
    extra: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.sections[name]


def _parse_sections(text: str, source: str):
    """Typed section dicts with defaults filled in, and the set of sections present."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out: dict[str, dict[str, Any]] = {}
    for name in cp.sections():
        if name not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{name}]")
        schema = SCHEMA[name]
        lowered = {k.lower(): k for k in schema}
        values = {}
        for raw_key, raw in cp.items(name):
            key = lowered.get(raw_key.lower())
            if key is None:
                raise ConfigError(f"{source}: unknown key {raw_key!r} in [{name}]")
            conv = schema[key][0]
            try:
                values[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: [{name}] {key}: {exc}") from None
        out[name] = values
    for name, schema in SCHEMA.items():
        sec = out.setdefault(name, {})
        for key, (_, default) in schema.items():
            sec.setdefault(key, default)
    return out, set(cp.sections())


def _env_float(name: str, fallback: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return fallback
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name} is not a number: {raw!r}") from None


def env_threads() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    if raw == "":
        return 1
    try:
        t = int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {ENV_THREADS} is not an integer: {raw!r}") from None
    if t < 1:
        raise ConfigError(f"{ENV_THREADS} must be >= 1")
    return t


def _grid(sec: dict) -> tuple:
    if sec["values"] is not None:
        if any(sec[k] is not None for k in ("start", "stop", "num")):
            raise ConfigError("[grid] give either values or start/stop/num, not both")
        return tuple(sec["values"])
    if all(sec[k] is not None for k in ("start", "stop", "num")):
        if sec["num"] < 1:
            raise ConfigError("[grid] num must be positive")
        return tuple(float(v) for v in np.linspace(sec["start"], sec["stop"], sec["num"]))
    if any(sec[k] is not None for k in ("start", "stop", "num")):
        raise ConfigError("[grid] start, stop and num must be given together")
    return ()


def outer_curve(spec: dict) -> PolarCurve:
    """Outer boundary curve described by a validated [domain] section."""
    kind = spec["kind"]
    if kind == "star":
        return StarPolarCurve.from_flat(spec["rho_coefficients"])
    return EccentricCircle(spec["R2"], spec["d"] if kind == "eccentric" else 0.0)


def build_from_spec(spec: dict, opts: SolverOptions, with_hole: bool = True):
    """Domain for a validated [domain] section."""
    center = spec["center"]
    if spec["kind"] in ("concentric", "eccentric") and tuple(center) == (0.0, 0.0):
        d = spec["d"] if spec["kind"] == "eccentric" else 0.0
        if with_hole:
            return annulus_domain(AnnulusSpec(spec["n"], spec["R1"], spec["R2"], d), opts.samples_out,
                                  opts.samples_in)
    curve = outer_curve(spec)
    if not with_hole:
        return build_simply_connected(curve, opts.samples_out, center)
    return build_domain(curve, spec["R1"], opts.samples_out, opts.samples_in, center)


# which sections each command reads; others must be absent
_USES = {
    "exact": {"domain", "exact"},
    "solve": {"domain", "solver"},
    "sweep": {"domain", "solver", "grid", "sweep", "lemmas"},
    "lemmas": {"domain", "grid", "lemmas"},
    "nodal": {"domain", "solver", "nodal"},
    "dumbbell": {"grid", "dumbbell"},
    "sandwich": {"domain", "solver"},
    "isoperimetric": {"domain", "solver", "grid", "isoperimetric"},
}
_COMMON = {"assertions", "output"}


def _validate_domain(command: str, spec: dict, present: bool):
    if not present:
        raise ConfigError(f"'{command}' needs a [domain] section")
    kind = spec["kind"]
    if kind is None:
        raise ConfigError("[domain] kind is required")
    if spec["n"] < 2:
        raise ConfigError("[domain] n must be >= 2")
    if len(spec["center"]) != 2:
        raise ConfigError("[domain] center must have two coordinates")
    if kind == "star":
        if spec["rho_coefficients"] is None:
            raise ConfigError("[domain] star domains need rho_coefficients")
        if len(spec["rho_coefficients"]) % 2 == 0:
            raise ConfigError("[domain] rho_coefficients must be c0, a1, b1, a2, b2, ...")
    else:
        if spec["R2"] is None:
            raise ConfigError(f"[domain] {kind} domains need R2")
        if spec["rho_coefficients"] is not None:
            raise ConfigError("[domain] rho_coefficients only apply to star domains")
    if kind == "concentric" and spec["d"] != 0:
        raise ConfigError("[domain] concentric domains have d = 0")
    if spec["n"] != 2 and command not in ("exact", "lemmas"):
        raise ConfigError(f"'{command}' is planar; [domain] n must be 2")


def load_config(command: str, path: str | os.PathLike) -> ExperimentConfig:
    """Read and validate ``path`` for ``command``; raises ConfigError."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(command, text, str(path))


def parse_config(command: str, text: str, source: str = "<config>") -> ExperimentConfig:
    secs, present = _parse_sections(text, source)
    stray = present - _USES[command] - _COMMON
    if stray:
        raise ConfigError(f"section(s) {sorted(stray)} are not used by '{command}'")

    sol = secs["solver"]
    dom = secs["domain"]
    try:
        opts = SolverOptions(
            N=sol["N"],
            m_out=dom["m_out"],
            m_in=dom["m_in"],
            tau_M=_env_float(ENV_TAU_M, sol["tau_M"]),
            tau_0=_env_float(ENV_TAU_0, sol["tau_0"]),
            mode=sol["mode"],
            cluster_rtol=sol["cluster_rtol"],
            flux_threshold=sol["flux_threshold"],
            conformal=sol["conformal"],
        )
    except ValueError as exc:
        raise ConfigError(f"[solver] {exc}") from None
    if sol["modes"] < 2:
        raise ConfigError("[solver] modes must be >= 2")
    for key in ("m_out", "m_in"):
        if dom[key] is not None and (dom[key] < 16 or dom[key] % 2):
            raise ConfigError(f"[domain] {key} must be even and >= 16")

    if "domain" in _USES[command]:
        _validate_domain(command, dom, "domain" in present)
    grid = _grid(secs["grid"])
    if "grid" in _USES[command] and not grid:
        raise ConfigError(f"'{command}' needs a [grid] with values or start/stop/num")

    cfg = ExperimentConfig(
        command=command,
        sections=secs,
        domain_spec=dom,
        solver=opts,
        grid=grid,
        threads=env_threads(),
        assertions=secs["assertions"]["enabled"],
        plot=secs["output"]["plot"],
        name=secs["output"]["name"] or command,
        source=source,
    )
    _check_command(cfg)
    return cfg


def _check_command(cfg: ExperimentConfig):
    """Command-specific checks, including building the domain (no solves)."""
    c, dom, grid = cfg.command, cfg.domain_spec, cfg.grid
    name = cfg.name
    if not name or any(ch in name for ch in "/\\") or name.startswith("."):
        raise ConfigError("[output] name must be a plain file stem")
    try:
        if c == "exact":
            if dom["kind"] != "concentric":
                raise ConfigError("'exact' needs a concentric [domain]")
            AnnulusSpec(dom["n"], dom["R1"], dom["R2"])
            if cfg.section("exact")["max_l"] < 1:
                raise ConfigError("[exact] max_l must be >= 1")
        elif c == "lemmas":
            if dom["kind"] not in ("concentric", "eccentric"):
                raise ConfigError("'lemmas' needs a concentric or eccentric [domain] (R1, R2)")
            from .lemmas import LemmaQuadratureConfig

            lq = LemmaQuadratureConfig(dom["n"], dom["R1"], dom["R2"], cfg.section("lemmas")["nodes"])
            for d in grid:
                lq.check_offset(d)
        elif c == "sweep":
            kind = cfg.section("sweep")["kind"]
            if kind == "eccentricity":
                if dom["kind"] not in ("concentric", "eccentric"):
                    raise ConfigError("eccentricity sweep needs a concentric or eccentric [domain]")
                for d in grid:
                    AnnulusSpec(2, dom["R1"], dom["R2"], d)
            else:
                if cfg.solver.mode != "steklov_neumann":
                    raise ConfigError("hole_shrink sweep runs in steklov_neumann mode")
                radii = list(grid)
                if any(b >= a for a, b in zip(radii, radii[1:])) or min(radii) <= 0:
                    raise ConfigError("hole_shrink radii must be positive and strictly decreasing")
                for r in radii:
                    build_from_spec({**dom, "R1": r}, cfg.solver)
        elif c == "dumbbell":
            from .analysis import DumbbellSpec

            for eps in grid:
                DumbbellSpec(eps, cfg.section("dumbbell")["R1"])
        elif c == "isoperimetric":
            from .geometry import is_convex, polar_constants

            if cfg.solver.mode != "steklov_neumann":
                raise ConfigError("isoperimetric checks run in steklov_neumann mode")
            curve = outer_curve(dom)
            R_m = polar_constants(curve)[0]
            sec = cfg.section("isoperimetric")
            for r in grid:
                if not 0 < r <= sec["smallness"] * R_m:
                    raise ConfigError(f"hole radius {r} outside (0, {sec['smallness']} * R_m]")
            if sec["constraint"] in ("perimeter", "both") and not is_convex(curve):
                raise ConfigError("perimeter comparison requires a convex outer boundary")
        else:  # solve, nodal, sandwich
            with_hole = not (c == "solve" and cfg.solver.mode == "steklov")
            if c != "solve" and cfg.solver.mode != "steklov_neumann":
                raise ConfigError(f"'{c}' runs in steklov_neumann mode")
            if with_hole and dom["R1"] is None:
                raise ConfigError("[domain] R1 is required")
            build_from_spec(dom, cfg.solver, with_hole)
            if c == "nodal":
                sec = cfg.section("nodal")
                if not sec["resolutions"] or min(sec["resolutions"]) < 256:
                    raise ConfigError("[nodal] resolutions must all be >= 256")
                if sec["random"] < 0:
                    raise ConfigError("[nodal] random must be >= 0")
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
