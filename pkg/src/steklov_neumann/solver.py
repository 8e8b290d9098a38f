"""Trefftz-Galerkin solver for Steklov-Neumann and Steklov eigenpairs in 2D.

Trial functions are harmonic, so the Dirichlet energy reduces to boundary
flux integrals and every matrix is assembled from boundary quadrature.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import kernels
from .geometry import (DoublyConnectedDomain, EccentricCircle, SimplyConnectedDomain, build_domain,
                       build_simply_connected)

log = logging.getLogger(__name__)

MODES = ("steklov_neumann", "steklov")


class SolverError(RuntimeError):
    """The discrete pencil is inconsistent (assembly bug or underresolution)."""


class QuadratureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SolverOptions:
    N: int = 24
    m_out: int | None = None
    m_in: int | None = None
    tau_M: float = 1e-12
    tau_0: float = 1e-8
    mode: str = "steklov_neumann"
    cluster_rtol: float = 1e-8
    flux_threshold: float = 1e-6
    conformal: bool = True

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation order N must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (0 < self.tau_M < 1 and 0 < self.tau_0 < 1):
            raise ValueError("tolerances must lie in (0, 1)")

    @property
    def samples_out(self) -> int:
        return self.m_out if self.m_out else 16 * self.N

    @property
    def samples_in(self) -> int:
        return self.m_in if self.m_in else 16 * self.N


def circle_pair_poles(R1: float, R2: float, d: float):
    """Common symmetric points ``(p, q)`` of the circles ``|z| = R1`` and ``|z - i d| = R2``.

    ``w = (z - p) / (z - q)`` maps both circles onto circles about 0; ``p``
    lies inside the hole and ``q`` outside the outer circle.
    """
    if d <= 0:
        raise ValueError("circles are concentric; no finite pole pair")
    b = R2**2 - R1**2 - d**2
    disc = b * b - 4 * d * d * R1**2
    if b <= 0 or disc <= 0:
        raise ValueError("hole circle must lie strictly inside the outer circle")
    a = (-b + np.sqrt(disc)) / (2 * d)  # small root, inside the hole
    return 1j * a, 1j * R1**2 / a


@dataclass(frozen=True)
class HarmonicBasis:
    """Scaled circular harmonics about ``center``.

    Column order: ``1``, ``log(r/scale_in)``, then ``(r/scale_out)^k cos kt``
    and ``sin kt`` for k = 1..N, then ``(scale_in/r)^k cos kt`` and ``sin kt``.
    The log and negative powers are dropped when ``include_negative`` is false.

    With ``poles = (p, q)`` the same family is composed with the Moebius map
    ``w = (z - p) / (z - q)`` (z relative to ``center``); composition with a
    conformal map keeps every member harmonic. Used for eccentric annuli,
    where the map makes both boundary circles concentric.
    """

    N: int
    scale_out: float
    scale_in: float = 1.0
    include_negative: bool = True
    center: tuple = (0.0, 0.0)
    poles: tuple | None = None

    @property
    def dim(self) -> int:
        return 4 * self.N + 2 if self.include_negative else 2 * self.N + 1

    @classmethod
    def for_domain(cls, domain: SimplyConnectedDomain, N: int, conformal: bool = True) -> "HarmonicBasis":
        if isinstance(domain, DoublyConnectedDomain):
            curve = domain.curve
            if conformal and isinstance(curve, EccentricCircle) and curve.d > 0:
                p, q = circle_pair_poles(domain.R1, curve.R2, curve.d)
                mob = lambda z: abs((z - p) / (z - q))
                return cls(N, mob(1j * (curve.d + curve.R2)), mob(1j * domain.R1), True,
                           tuple(domain.center), (p, q))
            return cls(N, domain.R_M, domain.R1, True, tuple(domain.center))
        return cls(N, domain.R_M, 1.0, False, tuple(domain.center))

    def _mapped(self, points):
        """Points in the expansion variable and ``dw/dz`` (1 without poles)."""
        p = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(self.center)
        if self.poles is None:
            return p, None
        a, b = self.poles
        z = p[:, 0] + 1j * p[:, 1]
        w = (z - a) / (z - b)
        return np.column_stack([w.real, w.imag]), (a - b) / (z - b) ** 2

    @staticmethod
    def _chain(gx, gy, dw):
        # for u = Re Phi(w(z)): u_x - i u_y = (U_x - i U_y) w'(z)
        h = (gx - 1j * gy) * (dw if dw.ndim == gx.ndim else dw[:, None])
        return h.real, -h.imag

    def evaluate(self, points, gradient: bool = True):
        """Basis matrix ``V`` (P x dim) and, optionally, its x and y derivatives."""
        p, dw = self._mapped(points)
        z = p[:, 0] + 1j * p[:, 1]
        P, N = len(z), self.N
        V = np.empty((P, self.dim))
        Gx = np.empty_like(V)
        Gy = np.empty_like(V)
        V[:, 0], Gx[:, 0], Gy[:, 0] = 1.0, 0.0, 0.0
        col = 1
        if self.include_negative:
            r2 = p[:, 0] ** 2 + p[:, 1] ** 2
            V[:, 1] = 0.5 * np.log(r2 / self.scale_in**2)
            Gx[:, 1], Gy[:, 1] = p[:, 0] / r2, p[:, 1] / r2
            col = 2
        w = z / self.scale_out
        wk = np.ones_like(z)
        for k in range(1, N + 1):
            dF = k * wk / self.scale_out  # d/dz (z/s)^k
            wk = wk * w
            # u = Re F: grad = (Re F', -Im F'); u = Im F: grad = (Im F', Re F')
            V[:, col], Gx[:, col], Gy[:, col] = wk.real, dF.real, -dF.imag
            V[:, col + 1], Gx[:, col + 1], Gy[:, col + 1] = wk.imag, dF.imag, dF.real
            col += 2
        if self.include_negative:
            v = self.scale_in / z
            vk = np.ones_like(z)
            for k in range(1, N + 1):
                vk = vk * v
                dG = -k * vk / z
                V[:, col], Gx[:, col], Gy[:, col] = vk.real, dG.real, -dG.imag
                # sin member is -Im(v^k)
                V[:, col + 1], Gx[:, col + 1], Gy[:, col + 1] = -vk.imag, -dG.imag, -dG.real
                col += 2
        if not gradient:
            return V
        if dw is not None:
            Gx, Gy = self._chain(Gx, Gy, dw)
        return V, Gx, Gy

    def series_coefficients(self, c):
        """Split a coefficient vector into the kernel's ``(c_one, c_log, alpha, beta)``."""
        c = np.asarray(c, dtype=float)
        N = self.N
        c_log = c[1] if self.include_negative else 0.0
        start = 2 if self.include_negative else 1
        pos = c[start:start + 2 * N]
        alpha = pos[0::2] - 1j * pos[1::2]
        if self.include_negative:
            neg = c[start + 2 * N:start + 4 * N]
            beta = neg[0::2] + 1j * neg[1::2]
        else:
            beta = np.zeros(0, dtype=complex)
        return c[0], c_log, alpha, beta

    def combine(self, c, points, gradient: bool = False):
        """Evaluate ``sum_j c_j phi_j`` at many points through the compiled kernel."""
        p, dw = self._mapped(points)
        c_one, c_log, alpha, beta = self.series_coefficients(c)
        out = kernels.harmonic_series(
            p[:, 0], p[:, 1], float(c_one), float(c_log), alpha, beta,
            float(self.scale_out), float(self.scale_in), gradient,
        )
        if not gradient or dw is None:
            return out
        return (out[0], *self._chain(out[1], out[2], dw))


def _boundary_parts(domain, which: str):
    parts = [domain.outer]
    if domain.inner is not None and which == "full":
        parts.append(domain.inner)
    return parts


def _flux_matrix(curve, basis):
    V, Gx, Gy = basis.evaluate(curve.points)
    dn = Gx * curve.normals[:, [0]] + Gy * curve.normals[:, [1]]
    return V, dn


def assemble_stiffness(domain, basis: HarmonicBasis):
    """Energy matrix ``K_ij = sum over boundary of phi_i d(phi_j)/dnu ds``.

    Returns ``(K, asymmetry)`` where K is symmetrized and ``asymmetry`` is
    the Frobenius norm of the pre-symmetrization skew part.
    """
    D = basis.dim
    K = np.zeros((D, D))
    for curve in (domain.outer, domain.inner):
        if curve is None:
            continue
        V, dn = _flux_matrix(curve, basis)
        K += V.T @ (curve.weights[:, None] * dn)
    asym = float(np.linalg.norm(K - K.T))
    K = 0.5 * (K + K.T)
    if asym > 1e-6 * np.linalg.norm(K):
        warnings.warn(
            f"stiffness asymmetry {asym:.3g} exceeds 1e-6 ||K||; boundary quadrature underresolved",
            QuadratureWarning,
            stacklevel=2,
        )
    return K, asym


def assemble_boundary_mass(domain, basis: HarmonicBasis, which: str = "gamma2"):
    """Gram matrix of traces on the Steklov part (``gamma2``) or the whole boundary (``full``)."""
    if which not in ("gamma2", "full"):
        raise ValueError("which must be 'gamma2' or 'full'")
    D = basis.dim
    M = np.zeros((D, D))
    for curve in _boundary_parts(domain, which):
        V = basis.evaluate(curve.points, gradient=False)
        M += V.T @ (curve.weights[:, None] * V)
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class SolverDiagnostics:
    truncation_rank: int
    mass_rank: int
    asymmetry: float
    flux_residual: tuple = ()
    convergence_delta: float = float("nan")
    shift: float = float("nan")


@dataclass(frozen=True, eq=False)
class EigenSolution:
    eigenvalues: np.ndarray
    coefficients: np.ndarray  # columns, trace-normalized on the Steklov boundary
    diagnostics: SolverDiagnostics
    basis: HarmonicBasis | None = None
    domain: SimplyConnectedDomain | None = None
    options: SolverOptions = field(default_factory=SolverOptions)

    @property
    def mu0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def mu1(self) -> float:
        return float(self.eigenvalues[1])

    def clusters(self, rtol: float | None = None):
        """Group indices of nearly equal eigenvalues (relative tolerance)."""
        rtol = self.options.cluster_rtol if rtol is None else rtol
        groups = [[0]]
        for i in range(1, len(self.eigenvalues)):
            prev = self.eigenvalues[groups[-1][-1]]
            if abs(self.eigenvalues[i] - prev) <= rtol * max(abs(prev), abs(self.eigenvalues[i])):
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def eigenspace(self, k: int = 1, rtol: float | None = None):
        for g in self.clusters(rtol):
            if k in g:
                return g
        raise IndexError(k)

    def multiplicity(self, k: int = 1, rtol: float | None = None) -> int:
        return len(self.eigenspace(k, rtol))

    def evaluate(self, mode: int, points, gradient: bool = False):
        return evaluate_eigenfunction(self, mode, points, gradient)

    def combination(self, weights):
        """Coefficient vector of a linear combination of modes ``{mode: weight}``."""
        c = np.zeros(self.coefficients.shape[0])
        for k, wk in weights.items():
            c += wk * self.coefficients[:, k]
        return c


def solve_pencil(K, M, opts: SolverOptions | None = None) -> EigenSolution:
    """Finite eigenvalues of ``K c = mu M c`` for symmetric K >= 0, M >= 0.

    ``B = K + s M`` (``s = ||K|| / ||M||``) is positive definite on the span of
    the basis. Directions with B-eigenvalue below ``tau_M`` times the largest
    are numerically redundant and dropped; in the B-orthonormal remainder the
    pencil becomes the standard problem ``M~ y = lam y`` with
    ``mu = 1/lam - s``. Null directions of M land at ``lam = 0`` and are
    discarded as infinite eigenvalues.
    """
    opts = opts or SolverOptions()
    K = np.asarray(K, dtype=float)
    M = np.asarray(M, dtype=float)
    if K.shape != M.shape or K.shape[0] != K.shape[1]:
        raise ValueError("K and M must be square and of equal size")
    normK, normM = np.linalg.norm(K, 2), np.linalg.norm(M, 2)
    if normM == 0 or not np.isfinite(normM):
        raise SolverError("boundary mass matrix is numerically zero")
    s = normK / normM if normK > 0 else 1.0

    mvals = linalg.eigvalsh(M)
    mass_rank = int(np.sum(mvals > opts.tau_M * mvals[-1]))

    b, Q = linalg.eigh(K + s * M)
    keep = b > opts.tau_M * b[-1]
    T = Q[:, keep] / np.sqrt(b[keep])
    Mt = T.T @ M @ T
    lam, Y = linalg.eigh(0.5 * (Mt + Mt.T))
    lam, Y = lam[::-1], Y[:, ::-1]
    finite = lam > opts.tau_M * lam[0]
    mu = 1.0 / lam[finite] - s
    C = T @ Y[:, finite]
    # y^T Mt y = lam, so c^T M c = lam; rescale to unit trace norm
    C = C / np.sqrt(lam[finite])

    tau0 = opts.tau_0 * normK / normM if normK > 0 else opts.tau_0
    if mu.size == 0 or abs(mu[0]) > tau0:
        raise SolverError(
            f"no eigenvalue below zero-tolerance {tau0:.3g}; constant mode missing (smallest {mu[:1]})"
        )
    if np.any(mu < -tau0):
        raise SolverError(f"negative eigenvalue {mu.min():.3g} beyond -tau_0: pencil is indefinite")
    if mu.size < 2:
        raise SolverError("no non-trivial eigenvalue in the discrete spectrum")
    # deterministic sign: largest-magnitude coefficient positive
    idx = np.argmax(np.abs(C), axis=0)
    C = C * np.sign(C[idx, np.arange(C.shape[1])])
    diag = SolverDiagnostics(int(keep.sum()), mass_rank, float("nan"), shift=float(s))
    return EigenSolution(mu, C, diag, options=opts)


def evaluate_eigenfunction(solution: EigenSolution, mode: int, points, gradient: bool = False, check: bool = True):
    """Values (and gradient) of eigenfunction ``mode`` at ``points``."""
    if solution.basis is None:
        raise ValueError("solution carries no basis")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if check and solution.domain is not None:
        r, t = solution.domain.polar(pts)
        tol = 1e-9 * solution.domain.R_M
        outside = r > solution.domain.curve.rho(t) + tol
        if isinstance(solution.domain, DoublyConnectedDomain):
            outside |= r < solution.domain.R1 - tol
        if np.any(outside):
            raise ValueError("evaluation point outside the closed domain")
    return solution.basis.combine(solution.coefficients[:, mode], pts, gradient)


def flux_residuals(solution: EigenSolution, modes) -> tuple:
    """``max |du/dnu|`` on the hole over ``max |u|`` on the outer boundary, per mode."""
    dom = solution.domain
    if dom is None or dom.inner is None:
        return tuple(0.0 for _ in modes)
    out = []
    for k in modes:
        c = solution.coefficients[:, k]
        _, gx, gy = solution.basis.combine(c, dom.inner.points, gradient=True)
        flux = gx * dom.inner.normals[:, 0] + gy * dom.inner.normals[:, 1]
        trace = solution.basis.combine(c, dom.outer.points)
        out.append(float(np.max(np.abs(flux)) / max(np.max(np.abs(trace)), 1e-300)))
    return tuple(out)


def solve(domain, opts: SolverOptions | None = None, n_modes: int = 8, check_convergence: bool = False) -> EigenSolution:
    """Assemble and solve on ``domain``; ``mode='steklov'`` ignores any hole."""
    opts = opts or SolverOptions()
    if opts.mode == "steklov":
        if isinstance(domain, DoublyConnectedDomain):
            domain = build_simply_connected(domain.curve, domain.outer.m, domain.center)
    elif not isinstance(domain, DoublyConnectedDomain):
        raise ValueError("Steklov-Neumann mode needs a domain with a hole")
    domain = resample(domain, opts)
    which = "gamma2"
    basis = HarmonicBasis.for_domain(domain, opts.N, opts.conformal)
    K, asym = assemble_stiffness(domain, basis)
    M = assemble_boundary_mass(domain, basis, which)
    sol = solve_pencil(K, M, opts)
    modes = range(min(n_modes, len(sol.eigenvalues)))
    sol = replace(
        sol,
        eigenvalues=sol.eigenvalues[: len(modes)],
        coefficients=sol.coefficients[:, : len(modes)],
        basis=basis,
        domain=domain,
    )
    diag = replace(sol.diagnostics, asymmetry=asym, flux_residual=flux_residuals(sol, modes))
    if check_convergence:
        finer = solve(domain, replace(opts, N=opts.N + 8, m_out=None, m_in=None), n_modes=2)
        diag = replace(diag, convergence_delta=abs(finer.mu1 - sol.mu1))
    log.debug("solved N=%d mu1=%.15g rank=%d asym=%.2e", opts.N, sol.mu1, diag.truncation_rank, asym)
    return replace(sol, diagnostics=diag)


def resample(domain, opts: SolverOptions):
    """Rebuild ``domain`` with the boundary sample counts in ``opts`` (no-op if they match)."""
    m_out, m_in = opts.samples_out, opts.samples_in
    if domain.outer.m == m_out and (domain.inner is None or domain.inner.m == m_in):
        return domain
    if isinstance(domain, DoublyConnectedDomain):
        return build_domain(domain.curve, domain.R1, opts.samples_out, opts.samples_in, domain.center)
    return build_simply_connected(domain.curve, opts.samples_out, domain.center)
