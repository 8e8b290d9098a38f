"""Angular integrals behind the eccentric-annulus comparison, and the bound Theta(d).

All integrals run over the polar angle ``t1`` in [0, pi] measured from the
axis along which the outer ball is displaced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .closed_forms import wallis_Ik


@dataclass(frozen=True)
class LemmaQuadratureConfig:
    n: int
    R1: float
    R2: float
    nodes: int = 256

    def __post_init__(self):
        if self.nodes < 64:
            raise ValueError("need at least 64 Gauss-Legendre nodes")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")
        if not (self.R2 > self.R1 > 0):
            raise ValueError("need R2 > R1 > 0")

    @cached_property
    def rule(self):
        """Gauss-Legendre nodes and weights mapped to [0, pi]."""
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w

    def refined(self) -> "LemmaQuadratureConfig":
        return LemmaQuadratureConfig(self.n, self.R1, self.R2, 2 * self.nodes)

    def check_offset(self, d: float):
        if not 0 <= d < self.R2 - self.R1:
            raise ValueError(f"offset must satisfy 0 <= d < {self.R2 - self.R1}, got {d}")


def eval_Rd(d: float, theta1, R2: float):
    """Distance from the origin to the sphere of radius R2 centered at d e_n.

    Returns ``(R_d, dR_d/dt1, sqrt(R_d^2 + R_d'^2))``.
    """
    if not 0 <= d < R2:
        raise ValueError("offset must satisfy 0 <= d < R2")
    t = np.asarray(theta1, dtype=float)
    c, s = np.cos(t), np.sin(t)
    root = np.sqrt(R2 * R2 - d * d * s * s)
    Rd = d * c + root
    dRd = -d * s - d * d * s * c / root
    surface = R2 * (1.0 + d * c / root)
    return Rd, dRd, surface


def phi_weight(n: int, t):
    s = np.sin(t)
    return -n * s**n + (n - 1) * s ** (n - 2)


def psi_weight(n: int, t):
    s = np.sin(t)
    return (n - 2) * s**n + (n - 1) * s ** (n - 2)


def energy_weight(n: int, t):
    """Angular weight of the ``R1^(2n)`` term in the probe energy.

    Agrees with :func:`psi_weight` only for n = 2.
    """
    s = np.sin(t)
    return n * (n - 2) * s**n + (n - 1) * s ** (n - 2)


@dataclass(frozen=True)
class LemmaValues:
    d: float
    n: int
    A1: float
    A2: float
    A3: float
    V1: float
    V2: float
    V3: float

    def phi(self, t):
        return phi_weight(self.n, t)

    def psi(self, t):
        return psi_weight(self.n, t)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("d", "A1", "A2", "A3", "V1", "V2", "V3")}


def lemma_values(d: float, cfg: LemmaQuadratureConfig) -> LemmaValues:
    cfg.check_offset(d)
    n, R1, R2 = cfg.n, cfg.R1, cfg.R2
    t, w = cfg.rule
    s = np.sin(t)
    Rd, _, surface = eval_Rd(d, t, R2)
    root = np.sqrt(R2 * R2 - d * d * s * s)

    A1 = w @ (s ** (n - 2) * (Rd**n - R1**n))
    A2 = w @ (phi_weight(n, t) * np.log(Rd / R1))
    A3 = w @ (psi_weight(n, t) * (Rd ** (-n) - R1 ** (-n)))
    V1 = w @ (s**n * Rd**n * surface)
    V2 = w @ (s**n * d * np.cos(t) / root)
    V3 = w @ (R2 * s**n / (Rd ** (n - 1) * root))
    return LemmaValues(float(d), n, *(float(v) for v in (A1, A2, A3, V1, V2, V3)))


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k (``S^0`` is two points)."""
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def probe_energy(d: float, cfg: LemmaQuadratureConfig, values: LemmaValues | None = None) -> float:
    """Dirichlet energy on the eccentric annulus of the first concentric eigenfunction.

    The eigenfunction is ``g(r) x_(n-1) / r``, odd in a coordinate orthogonal
    to the displacement. Averaging over the S^(n-2) fibre leaves

        |S^(n-2)| / (n-1)^3 * [ (n-1)^3/n A1 + 2 (n-1) R1^n A2 - R1^(2n)/n A3* ]

    where A3* is A3 with :func:`energy_weight` in place of psi. For n = 2
    this is ``A1 + 4 R1^2 A2 - R1^4 A3``.
    """
    v = lemma_values(d, cfg) if values is None else values
    n, R1, R2 = cfg.n, cfg.R1, cfg.R2
    if n == 2:
        A3_star = v.A3
    else:
        t, w = cfg.rule
        Rd = eval_Rd(d, t, R2)[0]
        A3_star = float(w @ (energy_weight(n, t) * (Rd ** (-n) - R1 ** (-n))))
    bracket = (n - 1) ** 3 / n * v.A1 + 2 * (n - 1) * R1**n * v.A2 - R1 ** (2 * n) / n * A3_star
    # |S^(n-2)| = 2 prod_{k<n-2} I_k
    prod = math.prod(wallis_Ik(k) for k in range(n - 2))
    return 2.0 * prod / (n - 1) ** 3 * bracket


def probe_trace_norm(d: float, cfg: LemmaQuadratureConfig) -> float:
    """Squared L^2 norm of the same function over the displaced outer sphere.

    Integrated directly: the sphere is a surface of revolution about the
    displacement axis, so only the t1 integral is left after the
    ``|S^(n-2)| / (n-1)`` factor from averaging ``omega_(n-1)^2``.
    """
    cfg.check_offset(d)
    n, R1, R2 = cfg.n, cfg.R1, cfg.R2
    t, w = cfg.rule
    Rd, _, surface = eval_Rd(d, t, R2)
    g = Rd + R1**n / ((n - 1) * Rd ** (n - 1))
    integrand = g**2 * np.sin(t) ** n * Rd ** (n - 2) * surface
    return sphere_area(n - 2) / (n - 1) * float(w @ integrand)


def rayleigh_bound_theta(d: float, cfg: LemmaQuadratureConfig) -> float:
    """Rayleigh quotient Theta(d) of the concentric eigenfunction on the eccentric annulus."""
    num = probe_energy(d, cfg)
    den = probe_trace_norm(d, cfg)
    if not den > 0:
        raise ArithmeticError("degenerate denominator in Rayleigh quotient")
    return num / den
