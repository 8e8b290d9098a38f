"""Command-line front end.

    steklov-neumann <command> --config FILE --out DIR

Exit status: 0 all assertions pass, 1 an assertion failed, 2 the config or
command line is malformed (nothing is written), 3 a solver diagnostic was
breached (Gamma1 flux residual above threshold, asymmetric stiffness, or an
inconsistent pencil).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .closed_forms import harmonic_multiplicity, mu1_annulus, mu_l_concentric
from .config import COMMANDS, ConfigError, ExperimentConfig, build_from_spec, load_config, outer_curve
from .geometry import AnnulusSpec
from .lemmas import LemmaQuadratureConfig, lemma_values, rayleigh_bound_theta
from .report import Assertion, ResultTable, atomic_write, summary_text, svg_line_plot
from .solver import QuadratureWarning, SolverError, solve

EXIT_OK, EXIT_ASSERT, EXIT_PARSE, EXIT_DIAG = 0, 1, 2, 3


@dataclass
class Outcome:
    table: ResultTable
    assertions: list = field(default_factory=list)
    breaches: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    plot: tuple | None = None  # (x column, [y columns], xlabel, ylabel)


def _check(out: Outcome, name: str, ok: bool, detail: str = ""):
    out.assertions.append(Assertion(name, bool(ok), detail))


def _flux_gate(out: Outcome, label: str, residual: float, threshold: float):
    if not residual <= threshold:
        out.breaches.append(f"{label}: Gamma1 flux residual {residual:.3e} > {threshold:.1e}")


def strictly_decreasing(values, floor: float = 0.0) -> bool:
    """Consecutive values decrease; pairs already at or below ``floor`` count as converged."""
    v = list(values)
    return all(b < a or (a <= floor and b <= floor) for a, b in zip(v, v[1:]))


def _is_disk_centered(spec: dict) -> bool:
    if spec["kind"] == "concentric":
        return True
    if spec["kind"] == "eccentric":
        return spec["d"] == 0
    coef = spec["rho_coefficients"]
    return all(c == 0 for c in coef[1:])


# -- runners -------------------------------------------------------------------

def run_exact(cfg: ExperimentConfig) -> Outcome:
    d = cfg.domain_spec
    spec = AnnulusSpec(d["n"], d["R1"], d["R2"])
    out = Outcome(ResultTable(("l", "mu", "multiplicity")), plot=("l", ["mu"], "l", "mu_l"))
    vals = []
    for l in range(1, cfg.section("exact")["max_l"] + 1):
        ev = mu_l_concentric(spec, l)
        vals.append(ev.value)
        out.table.add(l=l, mu=ev.value, multiplicity=harmonic_multiplicity(spec.n, l))
    _check(out, "mu_l positive", all(v > 0 for v in vals))
    _check(out, "mu_l increasing in l", all(b > a for a, b in zip(vals, vals[1:])))
    return out


def run_solve(cfg: ExperimentConfig) -> Outcome:
    spec, opts = cfg.domain_spec, cfg.solver
    steklov = opts.mode == "steklov"
    domain = build_from_spec(spec, opts, with_hole=not steklov)
    sol = solve(domain, opts, n_modes=cfg.section("solver")["modes"])
    clusters = sol.clusters()
    cluster_of = {k: i for i, group in enumerate(clusters) for k in group}
    out = Outcome(ResultTable(("k", "mu", "cluster", "multiplicity", "residual_gamma1")))
    for k, mu in enumerate(sol.eigenvalues):
        c = cluster_of[k]
        out.table.add(k=k, mu=mu, cluster=c, multiplicity=len(clusters[c]),
                      residual_gamma1=sol.diagnostics.flux_residual[k])
        if k >= 1 and not steklov:
            _flux_gate(out, f"mode {k}", sol.diagnostics.flux_residual[k], opts.flux_threshold)
    out.notes.append(f"basis dimension {sol.basis.dim}, retained rank {sol.diagnostics.truncation_rank}, "
                     f"stiffness asymmetry {sol.diagnostics.asymmetry:.2e}")
    out.notes.append(f"mu_1 = {sol.mu1:.15g} (multiplicity {sol.multiplicity(1)})")
    if not steklov and spec["kind"] == "concentric":
        exact = mu1_annulus(spec["R1"], spec["R2"])
        _check(out, "mu_1 matches concentric closed form", abs(sol.mu1 - exact) <= 1e-8,
               f"|{sol.mu1:.15g} - {exact:.15g}|")
        _check(out, "mu_1 has multiplicity 2", sol.multiplicity(1) == 2)
    if steklov and _is_disk_centered(spec) and spec["kind"] != "star":
        R = spec["R2"]
        worst = max(abs(sol.eigenvalues[k] - math.ceil(k / 2) / R) for k in range(len(sol.eigenvalues)))
        _check(out, "disk Steklov eigenvalues k/R", worst <= 1e-8, f"max error {worst:.2e}")
    return out


def run_sweep(cfg: ExperimentConfig) -> Outcome:
    if cfg.section("sweep")["kind"] == "eccentricity":
        return _eccentricity(cfg)
    return _hole_shrink(cfg)


def _eccentricity(cfg: ExperimentConfig) -> Outcome:
    spec, opts = cfg.domain_spec, cfg.solver
    R1, R2 = spec["R1"], spec["R2"]
    nodes = cfg.section("lemmas")["nodes"]
    rows = analysis.eccentricity_sweep(R1, R2, cfg.grid, opts, cfg.threads, nodes)
    cols = ("d", "mu1", "mu1_concentric", "theta_bound", "multiplicity", "residual_gamma1")
    out = Outcome(ResultTable(cols), plot=("d", ["mu1", "theta_bound", "mu1_concentric"], "d", "eigenvalue"))
    for r in rows:
        out.table.add(d=r.d, mu1=r.mu1, mu1_concentric=r.mu1_concentric, theta_bound=r.theta_bound,
                      multiplicity=r.multiplicity, residual_gamma1=r.residual_gamma1)
        _flux_gate(out, f"d = {r.d:g}", r.residual_gamma1, opts.flux_threshold)
    mu0 = mu1_annulus(R1, R2)
    excess = max(r.mu1 - mu0 for r in rows)
    _check(out, "mu1(d) <= mu1(0) + 1e-8", excess <= 1e-8, f"max excess {excess:.3e}")
    slack = max(r.mu1 - r.theta_bound for r in rows)
    _check(out, "mu1(d) <= Theta(d) + 1e-6", slack <= 1e-6, f"max mu1 - Theta {slack:.3e}")
    theta0 = rayleigh_bound_theta(0.0, LemmaQuadratureConfig(2, R1, R2, nodes))
    _check(out, "Theta(0) = mu1(0) within 1e-9", abs(theta0 - mu0) <= 1e-9, f"|{theta0:.15g} - {mu0:.15g}|")
    return out


def _hole_shrink(cfg: ExperimentConfig) -> Outcome:
    spec, opts = cfg.domain_spec, cfg.solver
    curve = outer_curve(spec)
    table = analysis.hole_shrink_sweep(curve, cfg.grid, opts, tuple(spec["center"]), cfg.threads)
    cols = ("r", "mu1", "sigma1", "gap", "trace_distance", "step1_ok", "residual_gamma1")
    out = Outcome(ResultTable(cols), plot=("r", ["mu1", "sigma1"], "hole radius r", "eigenvalue"))
    for row in table.rows:
        out.table.add(r=row.r, mu1=row.mu1, sigma1=row.sigma1, gap=row.gap, trace_distance=row.trace_distance,
                      step1_ok=row.step1_ok, residual_gamma1=row.flux_residual)
        _flux_gate(out, f"r = {row.r:g}", row.flux_residual, opts.flux_threshold)
    _check(out, "mu1(r) <= sigma1 + 1e-8 at every r", table.step1_holds)
    _check(out, "gap strictly decreasing", strictly_decreasing(table.gaps))
    _check(out, "aligned trace distance strictly decreasing", strictly_decreasing(table.distances, 1e-10),
           "distances at or below 1e-10 count as converged")
    if spec["kind"] != "star" and spec["d"] == 0:
        R = spec["R2"]
        worst = max(abs(row.gap - abs(mu1_annulus(row.r, R) - 1 / R)) for row in table.rows)
        _check(out, "gap matches disk closed form within 1e-7", worst <= 1e-7, f"max error {worst:.2e}")
    return out


def run_lemmas(cfg: ExperimentConfig) -> Outcome:
    spec = cfg.domain_spec
    lq = LemmaQuadratureConfig(spec["n"], spec["R1"], spec["R2"], cfg.section("lemmas")["nodes"])
    cols = ("d", "A1", "A2", "A3", "V1", "V2", "V3", "theta")
    out = Outcome(ResultTable(cols), plot=("d", ["theta"], "d", "Theta(d)"))

    def one(d):
        return lemma_values(d, lq), rayleigh_bound_theta(d, lq)

    base = lemma_values(0.0, lq)
    results = analysis.parallel_map(one, cfg.grid, cfg.threads)
    for d, (v, th) in zip(cfg.grid, results):
        out.table.add(d=d, A1=v.A1, A2=v.A2, A3=v.A3, V1=v.V1, V2=v.V2, V3=v.V3, theta=th)
    vals = [v for v, _ in results]
    worst2 = max(max(abs(v.A2), abs(v.V2)) for v in vals)
    _check(out, "A2 = V2 = 0 within 1e-10", worst2 <= 1e-10, f"max {worst2:.2e}")
    rel = max(max(abs(v.A1 - base.A1) / abs(base.A1), abs(v.V1 - base.V1) / abs(base.V1)) for v in vals)
    _check(out, "A1, V1 constant within 1e-10 relative", rel <= 1e-10, f"max {rel:.2e}")
    grow = [v for d, v in zip(cfg.grid, vals) if d > 0]
    _check(out, "A3(d) > A3(0) and V3(d) > V3(0) for d > 0",
           all(v.A3 > base.A3 and v.V3 > base.V3 for v in grow))
    return out


def run_nodal(cfg: ExperimentConfig) -> Outcome:
    opts, sec = cfg.solver, cfg.section("nodal")
    sol = solve(build_from_spec(cfg.domain_spec, opts), opts, n_modes=cfg.section("solver")["modes"])
    out = Outcome(ResultTable(("resolution", "vector", "random", "count")))
    m = sol.multiplicity(1)
    per_res = []
    for res in sec["resolutions"]:
        suite = analysis.nodal_suite(sol, res, sec["random"], sec["seed"], sec["zero_tol"])
        per_res.append(suite.counts)
        for i, c in enumerate(suite.counts):
            out.table.add(resolution=res, vector=i, random=i >= m, count=c)
    for k in sol.eigenspace(1):
        _flux_gate(out, f"mode {k}", sol.diagnostics.flux_residual[k], opts.flux_threshold)
    out.notes.append(f"mu_1 = {sol.mu1:.15g}, eigenspace dimension {m}")
    _check(out, "nodal count = 2 for every eigenspace vector", all(c == 2 for cs in per_res for c in cs))
    _check(out, "counts stable under grid refinement", all(cs == per_res[0] for cs in per_res))
    return out


def run_dumbbell(cfg: ExperimentConfig) -> Outcome:
    sec = cfg.section("dumbbell")
    cols = ("eps", "numerator", "denominator", "quotient", "expected", "boundary_mean")
    out = Outcome(ResultTable(cols), plot=("eps", ["quotient", "expected"], "eps", "Rayleigh quotient"))
    reps = [analysis.dumbbell_bound(analysis.DumbbellSpec(e, sec["R1"]), sec["nodes"]) for e in cfg.grid]
    for r in reps:
        out.table.add(eps=r.eps, numerator=r.numerator, denominator=r.denominator, quotient=r.quotient,
                      expected=2 * np.pi**2 * r.eps, boundary_mean=r.boundary_mean)
    err = max(abs(r.quotient - 2 * np.pi**2 * r.eps) for r in reps)
    _check(out, "quotient = 2 pi^2 eps within 1e-10", err <= 1e-10, f"max error {err:.2e}")
    mean = max(abs(r.boundary_mean) for r in reps)
    _check(out, "boundary mean of v within 1e-12 of 0", mean <= 1e-12, f"max {mean:.2e}")
    order = sorted(reps, key=lambda r: -r.eps)
    _check(out, "quotient decreases with eps", strictly_decreasing([r.quotient for r in order]))
    return out


def run_sandwich(cfg: ExperimentConfig) -> Outcome:
    opts = cfg.solver
    domain = build_from_spec(cfg.domain_spec, opts)
    sol = solve(domain, opts)
    rep = analysis.sandwich_bounds(domain, solution=sol)
    cols = ("mu1", "lower", "upper", "C1", "C2", "mu1_inner_annulus", "mu1_outer_annulus", "R_m", "R_M", "a")
    out = Outcome(ResultTable(cols))
    out.table.add(mu1=rep.mu1, lower=rep.lower, upper=rep.upper, C1=rep.C1, C2=rep.C2,
                  mu1_inner_annulus=rep.mu1_inner_annulus, mu1_outer_annulus=rep.mu1_outer_annulus,
                  R_m=rep.R_m, R_M=rep.R_M, a=rep.a)
    for k in sol.eigenspace(1):
        _flux_gate(out, f"mode {k}", sol.diagnostics.flux_residual[k], opts.flux_threshold)
    tol = 1e-8 * rep.mu1
    _check(out, "lower <= mu1 <= upper", rep.lower - tol <= rep.mu1 <= rep.upper + tol,
           f"{rep.lower:.10g} <= {rep.mu1:.10g} <= {rep.upper:.10g}")
    if rep.R_M - rep.R_m <= 1e-12 * rep.R_M:
        _check(out, "sandwich collapses to equality", abs(rep.upper - rep.lower) <= 1e-12 * rep.upper
               and abs(rep.mu1 - rep.lower) <= tol)
    return out


def run_isoperimetric(cfg: ExperimentConfig) -> Outcome:
    spec, opts = cfg.domain_spec, cfg.solver
    sec = cfg.section("isoperimetric")
    modes = ("measure", "perimeter") if sec["constraint"] == "both" else (sec["constraint"],)
    curve = outer_curve(spec)
    jobs = [(r, c) for r in cfg.grid for c in modes]
    reps = analysis.parallel_map(
        lambda job: analysis.isoperimetric_check(curve, job[0], job[1], opts, sec["smallness"],
                                                 tuple(spec["center"])),
        jobs, cfg.threads,
    )
    cols = ("r", "constraint", "mu1", "reference_radius", "mu1_annulus", "margin")
    out = Outcome(ResultTable(cols))
    for rep in reps:
        out.table.add(r=rep.r, constraint=rep.constraint, mu1=rep.mu1, reference_radius=rep.reference_radius,
                      mu1_annulus=rep.mu1_annulus, margin=rep.margin)
        _flux_gate(out, f"r = {rep.r:g} ({rep.constraint})", rep.residual_gamma1, opts.flux_threshold)
    if _is_disk_centered(spec) and tuple(spec["center"]) == (0.0, 0.0):
        worst = max(abs(rep.margin) for rep in reps)
        _check(out, "equality on the disk within 1e-8", worst <= 1e-8, f"max |margin| {worst:.2e}")
    else:
        for c in modes:
            low = min(rep.margin for rep in reps if rep.constraint == c)
            _check(out, f"strict inequality ({c})", low > 0, f"min margin {low:.3e}")
    return out


RUNNERS = {
    "exact": run_exact,
    "solve": run_solve,
    "sweep": run_sweep,
    "lemmas": run_lemmas,
    "nodal": run_nodal,
    "dumbbell": run_dumbbell,
    "sandwich": run_sandwich,
    "isoperimetric": run_isoperimetric,
}


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steklov-neumann",
                                     description="Steklov-Neumann eigenvalue experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the '{name}' experiment")
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--out", default="results", help="output directory (default: results)")
    return parser


def execute(cfg: ExperimentConfig, out_dir: str, stdout=None) -> int:
    stdout = stdout or sys.stdout
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", QuadratureWarning)
        try:
            outcome = RUNNERS[cfg.command](cfg)
        except SolverError as exc:
            stdout.write(summary_text(cfg.command, [], [f"solver error: {exc}"], cfg.assertions))
            return EXIT_DIAG
    for w in caught:
        if issubclass(w.category, QuadratureWarning):
            outcome.breaches.append(str(w.message))
    csv_path = os.path.join(out_dir, f"{cfg.name}.csv")
    atomic_write(csv_path, outcome.table.to_csv())
    written = [csv_path]
    if cfg.plot and outcome.plot and len(outcome.table.rows) > 1:
        xcol, ycols, xl, yl = outcome.plot
        svg = svg_line_plot(outcome.table.column(xcol), {c: outcome.table.column(c) for c in ycols}, xl, yl,
                            title=cfg.name)
        svg_path = os.path.join(out_dir, f"{cfg.name}.svg")
        atomic_write(svg_path, svg)
        written.append(svg_path)
    diag = list(outcome.notes) + [f"BREACH {b}" for b in outcome.breaches]
    diag += [f"wrote {p}" for p in written]
    stdout.write(summary_text(cfg.command, outcome.assertions, diag, cfg.assertions))
    if outcome.breaches:
        return EXIT_DIAG
    if cfg.assertions and not all(a.passed for a in outcome.assertions):
        return EXIT_ASSERT
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            raise OSError(f"{args.out} is not writable")
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return execute(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
