"""Analyses of mu_1 built on the solver and the closed forms."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .closed_forms import mu1_annulus, mu_l_concentric
from .geometry import (AnnulusSpec, DoublyConnectedDomain, PolarCurve, RevolutionProfile, annulus_domain,
                       build_domain, build_simply_connected, is_convex, polar_constants)
from .lemmas import LemmaQuadratureConfig, rayleigh_bound_theta
from .nodal import count_nodal_domains, interior_grid, mode_evaluator
from .solver import EigenSolution, SolverOptions, solve


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("STEKLOV_NEUMANN_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, threads: int | None = None):
    """``list(map(fn, items))``, optionally threaded; order is preserved."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- eigenspace alignment -----------------------------------------------------

def _trace_matrix(solution: EigenSolution, modes, curve):
    return np.column_stack([solution.basis.combine(solution.coefficients[:, k], curve.points) for k in modes])


def subspace_trace_distance(U, W, weights) -> float:
    """Largest L2(weights) residual of the columns of U after projection onto span W.

    Columns of U are normalized first, so the result lies in [0, 1].
    """
    w = np.sqrt(np.asarray(weights))[:, None]
    Uw, Ww = U * w, W * w
    Uw = Uw / np.linalg.norm(Uw, axis=0)
    Qw, _ = np.linalg.qr(Ww)
    resid = Uw - Qw @ (Qw.T @ Uw)
    return float(np.max(np.linalg.norm(resid, axis=0)))


def align_to_eigenspace(target, basis_values, weights):
    """Least-squares coefficients expressing ``target`` in ``basis_values`` columns."""
    w = np.sqrt(np.asarray(weights))
    coef, *_ = np.linalg.lstsq(basis_values * w[:, None], target * w, rcond=None)
    return coef


# -- eccentric annulus sweep --------------------------------------------------

@dataclass(frozen=True)
class EccentricityRow:
    d: float
    mu1: float
    mu1_concentric: float
    theta_bound: float
    multiplicity: int
    residual_gamma1: float


def eccentricity_sweep(R1: float, R2: float, offsets, opts: SolverOptions | None = None,
                       threads: int | None = None, nodes: int = 256) -> tuple:
    """mu_1 of the eccentric annuli against the concentric value and the bound Theta(d)."""
    opts = opts or SolverOptions()
    mu0 = mu_l_concentric(AnnulusSpec(2, R1, R2), 1).value
    cfg = LemmaQuadratureConfig(2, R1, R2, nodes)

    def one(d):
        spec = AnnulusSpec(2, R1, R2, float(d))
        sol = solve(annulus_domain(spec, opts.samples_out, opts.samples_in), opts)
        space = sol.eigenspace(1)
        return EccentricityRow(float(d), sol.mu1, mu0, rayleigh_bound_theta(float(d), cfg), len(space),
                               max(sol.diagnostics.flux_residual[k] for k in space))

    return tuple(parallel_map(one, offsets, threads))


# -- nodal domains -------------------------------------------------------------

@dataclass(frozen=True)
class NodalSuiteResult:
    counts: tuple
    multiplicity: int
    resolution: int


def nodal_suite(solution: EigenSolution, n: int = 256, random_combinations: int = 10, seed: int = 0,
                zero_tol: float = 1e-6) -> NodalSuiteResult:
    """Nodal counts of every mu_1 eigenvector and of random unit combinations in the eigenspace."""
    space = solution.eigenspace(1)
    rng = np.random.default_rng(seed)
    vectors = [solution.coefficients[:, k] for k in space]
    for _ in range(random_combinations):
        g = rng.standard_normal(len(space))
        g /= np.linalg.norm(g)
        vectors.append(solution.coefficients[:, space] @ g)
    grid = interior_grid(solution.domain, n)
    counts = parallel_map(
        lambda c: count_nodal_domains(solution.domain, mode_evaluator(solution, c), zero_tol=zero_tol,
                                      grid=grid).count,
        vectors,
    )
    return NodalSuiteResult(tuple(counts), len(space), n)


# -- harmonic extension into the hole -------------------------------------------

@dataclass(frozen=True)
class ExtensionReport:
    r: float
    R: float
    ratio: float
    envelope: float
    hole_energy: float
    annulus_energy: float

    @property
    def within_envelope(self) -> bool:
        return self.ratio <= self.envelope


def harmonic_extension_ratio(r: float, R: float, mode: int = 1, opts: SolverOptions | None = None,
                             solution: EigenSolution | None = None, margin: float = 1.5,
                             m_trace: int = 512) -> ExtensionReport:
    """Energy of the harmonic extension into B_r relative to the energy on A_{r,R}.

    The trace on the hole boundary is expanded in circular harmonics by FFT;
    the extension ``sum (rho/r)^k (a_k cos kt + b_k sin kt)`` has energy
    ``pi sum k (a_k^2 + b_k^2)``. The annulus energy of a trace-normalized
    Galerkin eigenvector equals its eigenvalue.
    """
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    if r / R >= 0.5:
        raise ValueError("the extension envelope is asymptotic; refuse r/R >= 1/2")
    n = 2
    if solution is None:
        solution = solve(annulus_domain(AnnulusSpec(2, r, R)), opts or SolverOptions())
    t = 2 * np.pi * np.arange(m_trace) / m_trace
    pts = solution.domain.center + r * np.column_stack([np.cos(t), np.sin(t)])
    trace = solution.basis.combine(solution.coefficients[:, mode], pts)
    coef = np.fft.rfft(trace) * (2.0 / m_trace)
    k = np.arange(coef.size)
    hole = float(np.pi * np.sum(k[1:m_trace // 2] * np.abs(coef[1:m_trace // 2]) ** 2))
    annulus = float(solution.eigenvalues[mode])
    ratio = hole / annulus if annulus > 1e-12 else 0.0
    return ExtensionReport(r, R, ratio, 5.0 * (r / R) ** n * margin, hole, annulus)


# -- star-shaped sandwich ----------------------------------------------------------

@dataclass(frozen=True)
class SandwichReport:
    mu1: float
    lower: float
    upper: float
    C1: float
    C2: float
    mu1_inner_annulus: float
    mu1_outer_annulus: float
    R_m: float
    R_M: float
    a: float

    @property
    def holds(self) -> bool:
        return self.lower <= self.mu1 <= self.upper


def sandwich_constants(R_m: float, R_M: float, a: float, profile: RevolutionProfile):
    """``(C1, C2)`` for the comparison with the annuli of radii R_m and R_M."""
    n = profile.n
    hm, hM = float(profile(R_m)) ** (n - 1), float(profile(R_M)) ** (n - 1)
    return hm / (math.sqrt(1.0 + a) * hM), hM / hm


def sandwich_bounds(domain: DoublyConnectedDomain, profile: RevolutionProfile | None = None,
                    opts: SolverOptions | None = None, solution: EigenSolution | None = None) -> SandwichReport:
    """Solver value of mu_1 against the two annulus comparisons.

    Annulus eigenvalues are the planar closed forms, so the eigenvalue
    comparison is meaningful for the Euclidean profile ``h(r) = r``; other
    profiles only change the constants.

    The upper bound always holds. The lower constant does not: on
    ``1 + eps cos 2t`` with a small hole, mu_1 tends to ``1 - 3 eps / 2``
    while ``C1 mu_1(A_{R1,R_m})`` tends to ``1 - eps``. ``holds`` reports it.
    """
    if not isinstance(domain, DoublyConnectedDomain):
        raise ValueError("sandwich bounds need a star-shaped domain with a hole")
    profile = profile or RevolutionProfile.euclidean()
    if domain.R_m <= domain.R1:
        raise ValueError("hole must lie inside the inscribed ball (R_m > R1)")
    if solution is None:
        solution = solve(domain, opts or SolverOptions())
    C1, C2 = sandwich_constants(domain.R_m, domain.R_M, domain.a, profile)
    inner = mu1_annulus(domain.R1, domain.R_m)
    outer = mu1_annulus(domain.R1, domain.R_M)
    return SandwichReport(solution.mu1, C1 * inner, C2 * outer, C1, C2, inner, outer,
                          domain.R_m, domain.R_M, domain.a)


# -- vanishing hole ------------------------------------------------------------------

@dataclass(frozen=True)
class HoleShrinkRow:
    r: float
    mu1: float
    sigma1: float
    gap: float
    trace_distance: float
    step1_ok: bool
    flux_residual: float


@dataclass(frozen=True)
class HoleShrinkTable:
    sigma1: float
    rows: tuple

    @property
    def gaps(self):
        return np.array([row.gap for row in self.rows])

    @property
    def distances(self):
        return np.array([row.trace_distance for row in self.rows])

    @property
    def step1_holds(self) -> bool:
        return all(row.step1_ok for row in self.rows)


def hole_shrink_sweep(outer: PolarCurve, radii, opts: SolverOptions | None = None, center=(0.0, 0.0),
                      threads: int | None = None) -> HoleShrinkTable:
    """mu_1 of the outer domain minus shrinking holes, against sigma_1 of the outer domain.

    Traces are compared on the common outer nodes after projecting each
    mu_1 eigenvector onto the sigma_1 eigenspace (both trace-normalized).
    """
    opts = opts or SolverOptions()
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])) or min(radii) <= 0:
        raise ValueError("radii must be positive and strictly decreasing")
    R_m = polar_constants(outer)[0]
    if radii[0] >= R_m:
        raise ValueError(f"hole of radius {radii[0]} is not inside the outer domain (R_m = {R_m})")
    steklov = solve(build_simply_connected(outer, opts.samples_out, center), replace(opts, mode="steklov"))
    sigma1 = steklov.mu1
    ref_curve = steklov.domain.outer
    ref = _trace_matrix(steklov, steklov.eigenspace(1), ref_curve)

    def one(r):
        sol = solve(build_domain(outer, r, opts.samples_out, opts.samples_in, center), opts)
        space = sol.eigenspace(1)
        U = _trace_matrix(sol, space, ref_curve)
        dist = subspace_trace_distance(U, ref, ref_curve.weights)
        return HoleShrinkRow(r, sol.mu1, sigma1, abs(sol.mu1 - sigma1), dist,
                             sol.mu1 <= sigma1 + 1e-8, max(sol.diagnostics.flux_residual[k] for k in space))

    rows = parallel_map(one, radii, threads)
    return HoleShrinkTable(sigma1, tuple(rows))


# -- isoperimetric comparisons for small holes ---------------------------------------

@dataclass(frozen=True)
class IsoperimetricReport:
    constraint: str
    r: float
    mu1: float
    reference_radius: float
    mu1_annulus: float
    residual_gamma1: float = 0.0

    @property
    def margin(self) -> float:
        return self.mu1_annulus - self.mu1


def isoperimetric_check(outer: PolarCurve, r: float, constraint: str = "measure",
                        opts: SolverOptions | None = None, smallness: float = 0.05,
                        center=(0.0, 0.0)) -> IsoperimetricReport:
    """Compare mu_1 with the annulus whose outer ball has equal area or equal perimeter."""
    if constraint not in ("measure", "perimeter"):
        raise ValueError("constraint must be 'measure' or 'perimeter'")
    R_m = polar_constants(outer)[0]
    if r > smallness * R_m:
        raise ValueError(f"hole radius {r} exceeds the smallness threshold {smallness} * R_m = {smallness * R_m}")
    if constraint == "perimeter" and not is_convex(outer):
        raise ValueError("perimeter comparison requires a convex outer domain")
    opts = opts or SolverOptions()
    domain = build_domain(outer, r, opts.samples_out, opts.samples_in, center)
    if constraint == "measure":
        R_ref = math.sqrt(domain.area() / math.pi)
    else:
        R_ref = domain.perimeter() / (2 * math.pi)
    sol = solve(domain, opts)
    resid = max(sol.diagnostics.flux_residual[k] for k in sol.eigenspace(1))
    return IsoperimetricReport(constraint, r, sol.mu1, R_ref, mu1_annulus(r, R_ref), resid)


# -- non-star-shaped counterexample ------------------------------------------------------

@dataclass(frozen=True)
class DumbbellSpec:
    """Two balls joined by an eps x eps^3 neck, with a hole of radius R1 in the right ball."""

    eps: float
    R1: float = 0.5

    def __post_init__(self):
        if not 0 < self.eps <= 0.2:
            raise ValueError("neck parameter must satisfy 0 < eps <= 0.2")
        if not 0 < self.R1 < 1:
            raise ValueError("hole radius must satisfy 0 < R1 < 1")

    @property
    def ball_radius(self) -> float:
        return math.sqrt((1 + self.eps / 2) ** 2 + self.eps**6 / 4)

    @property
    def centers(self):
        return (-1 - self.eps, 0.0), (1 + self.eps, 0.0)

    @property
    def neck(self):
        """Half-widths of the neck rectangle."""
        return self.eps / 2, self.eps**3 / 2


@dataclass(frozen=True)
class DumbbellReport:
    eps: float
    numerator: float
    denominator: float
    boundary_integral: float
    boundary_mean: float

    @property
    def quotient(self) -> float:
        return self.numerator / self.denominator


def dumbbell_bound(spec: DumbbellSpec, nodes: int = 64) -> DumbbellReport:
    """Rayleigh quotient of ``v = sin(2 pi x / eps)`` supported in the neck.

    Only the two long sides of the neck lie on the outer boundary; v vanishes
    on the short sides, where the neck meets the balls.
    """
    eps = spec.eps
    hx, hy = spec.neck
    x, w = np.polynomial.legendre.leggauss(nodes)
    x, w = hx * x, hx * w
    v = np.sin(2 * np.pi * x / eps)
    side = float(w @ v)
    side_sq = float(w @ v**2)
    boundary_integral = 2 * side
    denominator = 2 * side_sq
    y, wy = np.polynomial.legendre.leggauss(4)
    grad_sq = (2 * np.pi / eps) ** 2 * np.cos(2 * np.pi * x / eps) ** 2
    numerator = float(w @ grad_sq) * float(np.sum(hy * wy))
    return DumbbellReport(eps, numerator, denominator, boundary_integral, boundary_integral / (4 * hx))
