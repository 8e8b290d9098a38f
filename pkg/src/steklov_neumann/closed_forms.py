"""Exact eigenvalues and eigenfunctions of the concentric annulus and the ball."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnnulusSpec

MAX_HARMONIC = 64


@dataclass(frozen=True)
class AnnulusEigenvalue:
    l: int
    value: float
    multiplicity: int


def harmonic_multiplicity(n: int, l: int) -> int:
    """Dimension of the degree-``l`` spherical harmonics on S^{n-1}."""
    if l < 0:
        raise ValueError("harmonic index must be non-negative")
    if l == 0:
        return 1
    return math.comb(l + n - 1, n - 1) - math.comb(l + n - 3, n - 1)


def _require_concentric(spec: AnnulusSpec):
    if spec.d != 0:
        raise ValueError("closed forms are only available for the concentric annulus (d = 0)")


def mu_l_concentric(spec: AnnulusSpec, l: int) -> AnnulusEigenvalue:
    """Steklov-Neumann eigenvalue of degree ``l`` on B_{R2} minus closed B_{R1}.

    Evaluated as ``l (l+n-2) (1 - q) / (R2 ((l+n-2) + l q))`` with
    ``q = (R1/R2)^(2l+n-2)``, which is the usual ratio of powers of R2/R1
    divided through so that nothing overflows.
    """
    _require_concentric(spec)
    if l < 0 or l > MAX_HARMONIC or int(l) != l:
        raise ValueError(f"harmonic index must be an integer in [0, {MAX_HARMONIC}]")
    n = spec.n
    mult = harmonic_multiplicity(n, l)
    if l == 0:
        return AnnulusEigenvalue(0, 0.0, mult)
    q = (spec.R1 / spec.R2) ** (2 * l + n - 2)
    value = l * (l + n - 2) * (1.0 - q) / (spec.R2 * ((l + n - 2) + l * q))
    return AnnulusEigenvalue(int(l), value, mult)


def mu1_annulus(r: float, R: float, n: int = 2) -> float:
    """First non-zero eigenvalue of the concentric annulus A_{r,R}."""
    return mu_l_concentric(AnnulusSpec(n, r, R), 1).value


def _check_radius(spec: AnnulusSpec, r):
    r = np.asarray(r, dtype=float)
    tol = 1e-12 * spec.R2
    if np.any(r < spec.R1 - tol) or np.any(r > spec.R2 + tol):
        raise ValueError(f"radius outside [{spec.R1}, {spec.R2}]")
    return r


def radial_part(spec: AnnulusSpec, l: int, r):
    """Radial factor ``r^l + l R1^(2l+n-2) / ((l+n-2) r^(l+n-2))``."""
    _require_concentric(spec)
    if l < 1:
        raise ValueError("radial part is defined for l >= 1")
    r = _check_radius(spec, r)
    n = spec.n
    return r**l + l * spec.R1 ** (2 * l + n - 2) / ((l + n - 2) * r ** (l + n - 2))


def radial_part_derivative(spec: AnnulusSpec, l: int, r):
    _require_concentric(spec)
    if l < 1:
        raise ValueError("radial part is defined for l >= 1")
    r = _check_radius(spec, r)
    n = spec.n
    return l * r ** (l - 1) - l * spec.R1 ** (2 * l + n - 2) / r ** (l + n - 1)


def _points(spec, point):
    x = np.asarray(point, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != spec.n:
        raise ValueError(f"points must have {spec.n} coordinates")
    return x, single


def eigenfunction_cartesian(spec: AnnulusSpec, i: int, point):
    """First eigenfunction ``(r + R1^n/((n-1) r^(n-1))) x_i / r`` (``i`` is 1-based)."""
    _require_concentric(spec)
    if not 1 <= i <= spec.n:
        raise ValueError(f"axis index must be in 1..{spec.n}")
    x, single = _points(spec, point)
    r = np.linalg.norm(x, axis=1)
    value = radial_part(spec, 1, r) * x[:, i - 1] / r
    return float(value[0]) if single else value


def eigenfunction_cartesian_gradient(spec: AnnulusSpec, i: int, point):
    _require_concentric(spec)
    x, single = _points(spec, point)
    r = np.linalg.norm(x, axis=1)
    g, dg = radial_part(spec, 1, r), radial_part_derivative(spec, 1, r)
    xi = x[:, i - 1]
    # grad(g(r) x_i / r) = (g' - g/r) x_i x / r^2 + (g/r) e_i
    grad = ((dg - g / r) * xi / r**2)[:, None] * x
    grad[:, i - 1] += g / r
    return grad[0] if single else grad


def sigma_1_ball(R: float) -> float:
    """First non-trivial Steklov eigenvalue of a ball of radius R."""
    if R <= 0:
        raise ValueError("radius must be positive")
    return 1.0 / R


def wallis_Ik(k: int) -> float:
    """``I_k = int_0^pi sin^k t dt`` by the Wallis recursion."""
    if k < 0:
        raise ValueError("k must be non-negative")
    values = [math.pi, 2.0]
    for j in range(2, k + 1):
        values.append((j - 1) / j * values[j - 2])
    return values[k]
