"""Planar domains: polar-graph outer boundaries, circular holes, discretization.

Every outer boundary is a polar graph ``r = rho(theta)`` about the hole center.
Eccentric circles are handled through the same interface via the closed form
of their radial distance, so discretization has a single code path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

#: Sample density used for the geometric constants R_m, R_M and a.
CONSTANT_GRID = 4096


@dataclass(frozen=True)
class AnnulusSpec:
    """Region between an inner ball B_{R1}(0) and an outer ball B_{R2}(d e_n).

    The outer center is offset by ``d`` along the last coordinate axis;
    ``d == 0`` is the concentric annulus.
    """

    n: int
    R1: float
    R2: float
    d: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        if not (self.R1 > 0 and self.R2 > self.R1):
            raise ValueError(f"need R2 > R1 > 0, got R1={self.R1}, R2={self.R2}")
        if not (0 <= self.d < self.R2 - self.R1):
            raise ValueError(
                f"offset d must satisfy 0 <= d < R2 - R1 = {self.R2 - self.R1}, got {self.d}"
            )

    @property
    def concentric(self) -> bool:
        return self.d == 0


class PolarCurve:
    """Closed curve given as a positive polar graph about the origin."""

    def rho(self, theta):
        raise NotImplementedError

    def drho(self, theta):
        raise NotImplementedError

    def d2rho(self, theta):
        raise NotImplementedError

    def scaled(self, s: float) -> "PolarCurve":
        raise NotImplementedError

    def check_positive(self, samples: int = CONSTANT_GRID):
        theta = 2 * np.pi * np.arange(samples) / samples
        if np.min(self.rho(theta)) <= 0:
            raise ValueError("polar radius rho(theta) must be positive everywhere")


@dataclass(frozen=True)
class StarPolarCurve(PolarCurve):
    """Trigonometric polynomial ``rho = c0 + sum_k a_k cos(k t) + b_k sin(k t)``.

    ``cos_coefs[k-1]`` and ``sin_coefs[k-1]`` hold a_k and b_k.
    """

    c0: float
    cos_coefs: tuple = ()
    sin_coefs: tuple = ()

    def __post_init__(self):
        a = tuple(float(v) for v in self.cos_coefs)
        b = tuple(float(v) for v in self.sin_coefs)
        K = max(len(a), len(b))
        object.__setattr__(self, "cos_coefs", a + (0.0,) * (K - len(a)))
        object.__setattr__(self, "sin_coefs", b + (0.0,) * (K - len(b)))
        object.__setattr__(self, "c0", float(self.c0))
        self.check_positive()

    @classmethod
    def from_flat(cls, coefficients) -> "StarPolarCurve":
        """Build from ``[c0, a1, b1, a2, b2, ...]``."""
        coefficients = [float(v) for v in coefficients]
        if not coefficients:
            raise ValueError("rho coefficients must contain at least c0")
        rest = coefficients[1:]
        if len(rest) % 2:
            rest = rest + [0.0]
        return cls(coefficients[0], tuple(rest[0::2]), tuple(rest[1::2]))

    @property
    def order(self) -> int:
        return len(self.cos_coefs)

    def _series(self, theta, deriv: int):
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self.c0 if deriv == 0 else 0.0)
        for k, (a, b) in enumerate(zip(self.cos_coefs, self.sin_coefs), start=1):
            c, s = np.cos(k * theta), np.sin(k * theta)
            if deriv == 0:
                out = out + a * c + b * s
            elif deriv == 1:
                out = out + k * (-a * s + b * c)
            else:
                out = out - k * k * (a * c + b * s)
        return out

    def rho(self, theta):
        return self._series(theta, 0)

    def drho(self, theta):
        return self._series(theta, 1)

    def d2rho(self, theta):
        return self._series(theta, 2)

    def scaled(self, s: float) -> "StarPolarCurve":
        return StarPolarCurve(
            s * self.c0,
            tuple(s * v for v in self.cos_coefs),
            tuple(s * v for v in self.sin_coefs),
        )

    @property
    def is_constant(self) -> bool:
        return not any(self.cos_coefs) and not any(self.sin_coefs)


@dataclass(frozen=True)
class EccentricCircle(PolarCurve):
    """Circle of radius R2 centered at (0, d), seen from the origin.

    With ``t1`` the angle from the positive y axis, the radial distance is
    ``d cos t1 + sqrt(R2^2 - d^2 sin^2 t1)``; in the usual polar angle this is
    ``d sin t + sqrt(R2^2 - d^2 cos^2 t)``.
    """

    R2: float
    d: float = 0.0

    def __post_init__(self):
        if self.R2 <= 0:
            raise ValueError("circle radius must be positive")
        if not 0 <= self.d < self.R2:
            raise ValueError("origin must lie inside the circle (0 <= d < R2)")

    def _root(self, theta):
        return np.sqrt(self.R2**2 - self.d**2 * np.cos(theta) ** 2)

    def rho(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.d * np.sin(theta) + self._root(theta)

    def drho(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        return self.d * c + self.d**2 * c * s / self._root(theta)

    def d2rho(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        q = self._root(theta)
        d2 = self.d**2
        # d/dt of d^2 c s / q
        return -self.d * s + d2 * (c * c - s * s) / q - (d2 * c * s) ** 2 / q**3

    def scaled(self, s: float) -> "EccentricCircle":
        return EccentricCircle(s * self.R2, s * self.d)

    @property
    def is_constant(self) -> bool:
        return self.d == 0


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Quadrature carrier for one closed boundary component.

    ``normals`` point out of the domain: away from the origin on the outer
    boundary, toward the hole center on a hole boundary.
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    orientation: str = "outward"

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.weights))

    def translated(self, shift) -> "BoundaryCurve":
        shift = np.asarray(shift, dtype=float)
        return BoundaryCurve(self.points + shift, self.normals, self.weights, self.orientation)


def _check_orientation(orientation: str) -> float:
    if orientation == "outward":
        return 1.0
    if orientation == "inward":
        return -1.0
    raise ValueError(f"orientation must be 'outward' or 'inward', got {orientation!r}")


def discretize_circle(center, radius: float, m: int, orientation: str = "outward") -> BoundaryCurve:
    """Equispaced periodic-trapezoid discretization of a circle.

    ``orientation='inward'`` is used for a hole: the domain lies outside the
    circle, so the domain's outward normal points at the center.
    """
    sign = _check_orientation(orientation)
    if radius <= 0:
        raise ValueError("radius must be positive")
    if m < 16 or m % 2:
        raise ValueError("sample count must be even and at least 16")
    t = 2 * np.pi * np.arange(m) / m
    radial = np.column_stack([np.cos(t), np.sin(t)])
    points = np.asarray(center, dtype=float) + radius * radial
    weights = np.full(m, 2 * np.pi * radius / m)
    return BoundaryCurve(points, sign * radial, weights, orientation)


def discretize_star(curve: PolarCurve, m: int, orientation: str = "outward", center=(0.0, 0.0)) -> BoundaryCurve:
    """Discretize a polar graph at ``m`` equispaced polar angles."""
    sign = _check_orientation(orientation)
    if m < 16 or m % 2:
        raise ValueError("sample count must be even and at least 16")
    t = 2 * np.pi * np.arange(m) / m
    r, dr = curve.rho(t), curve.drho(t)
    if np.min(r) <= 0:
        raise ValueError("non-positive polar radius detected")
    c, s = np.cos(t), np.sin(t)
    tangent = np.column_stack([dr * c - r * s, dr * s + r * c])
    speed = np.hypot(tangent[:, 0], tangent[:, 1])
    normals = sign * np.column_stack([tangent[:, 1], -tangent[:, 0]]) / speed[:, None]
    points = np.column_stack([r * c, r * s]) + np.asarray(center, dtype=float)
    return BoundaryCurve(points, normals, speed * (2 * np.pi / m), orientation)


def _polish_extremum(f: Callable, theta_grid: np.ndarray, values: np.ndarray, which: str) -> float:
    i = int(np.argmin(values) if which == "min" else np.argmax(values))
    h = theta_grid[1] - theta_grid[0]
    sign = 1.0 if which == "min" else -1.0
    res = minimize_scalar(
        lambda t: sign * float(f(t)),
        bounds=(theta_grid[i] - h, theta_grid[i] + h),
        method="bounded",
        options={"xatol": 1e-13},
    )
    best = sign * res.fun
    grid_best = values[i]
    return min(best, grid_best) if which == "min" else max(best, grid_best)


def polar_constants(curve: PolarCurve, samples: int = CONSTANT_GRID):
    """Return ``(R_m, R_M, a)`` of a polar graph.

    R_m and R_M are the extreme polar radii; ``a = max (rho'/rho)^2`` is the
    squared tangent of the largest angle between normal and radial direction.
    Extrema are located on a dense grid and then polished with a bounded
    scalar search around the best grid node.
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    r = curve.rho(theta)
    R_m = _polish_extremum(curve.rho, theta, r, "min")
    R_M = _polish_extremum(curve.rho, theta, r, "max")
    if getattr(curve, "is_constant", False):
        return R_m, R_M, 0.0
    ratio = lambda t: (curve.drho(t) / curve.rho(t)) ** 2  # noqa: E731
    a = _polish_extremum(ratio, theta, ratio(theta), "max")
    return R_m, R_M, a


def _default_m(m):
    return 384 if m is None else int(m)


@dataclass(frozen=True, eq=False)
class SimplyConnectedDomain:
    """Star-shaped domain bounded by a polar graph about ``center``."""

    curve: PolarCurve
    outer: BoundaryCurve
    center: np.ndarray
    R_m: float
    R_M: float
    a: float

    @property
    def inner(self):
        return None

    def polar(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center
        return np.hypot(p[:, 0], p[:, 1]), np.arctan2(p[:, 1], p[:, 0])

    def contains(self, points) -> np.ndarray:
        r, t = self.polar(points)
        return r < self.curve.rho(t)

    def area(self, samples: int = CONSTANT_GRID) -> float:
        theta = 2 * np.pi * np.arange(samples) / samples
        return float(0.5 * np.mean(self.curve.rho(theta) ** 2) * 2 * np.pi)

    def perimeter(self, samples: int = CONSTANT_GRID) -> float:
        theta = 2 * np.pi * np.arange(samples) / samples
        return float(np.mean(np.hypot(self.curve.rho(theta), self.curve.drho(theta))) * 2 * np.pi)


@dataclass(frozen=True, eq=False)
class DoublyConnectedDomain(SimplyConnectedDomain):
    """Polar-graph outer boundary with a circular hole of radius R1 at ``center``."""

    R1: float = 0.0
    inner_curve: BoundaryCurve = field(default=None)

    @property
    def inner(self) -> BoundaryCurve:
        return self.inner_curve

    def contains(self, points) -> np.ndarray:
        r, t = self.polar(points)
        return (r > self.R1) & (r < self.curve.rho(t))

    def translated(self, shift) -> "DoublyConnectedDomain":
        return build_domain(
            self.curve, self.R1, self.outer.m, self.inner.m, center=self.center + np.asarray(shift, dtype=float)
        )

    def scaled(self, s: float) -> "DoublyConnectedDomain":
        return build_domain(self.curve.scaled(s), s * self.R1, self.outer.m, self.inner.m, center=s * self.center)


def build_domain(outer: PolarCurve, R1: float, m_out: int | None = None, m_in: int | None = None,
                 center=(0.0, 0.0)) -> DoublyConnectedDomain:
    """Assemble the perforated domain ``{R1 < |x - center| < rho(theta)}``."""
    outer.check_positive()
    center = np.asarray(center, dtype=float)
    R_m, R_M, a = polar_constants(outer)
    if not R1 > 0:
        raise ValueError("hole radius must be positive")
    if R1 >= R_m:
        raise ValueError(f"hole of radius {R1} is not strictly inside the outer boundary (R_m = {R_m})")
    m_out, m_in = _default_m(m_out), _default_m(m_in)
    return DoublyConnectedDomain(
        curve=outer,
        outer=discretize_star(outer, m_out, center=center),
        center=center,
        R_m=R_m,
        R_M=R_M,
        a=a,
        R1=float(R1),
        inner_curve=discretize_circle(center, R1, m_in, orientation="inward"),
    )


def build_simply_connected(outer: PolarCurve, m_out: int | None = None, center=(0.0, 0.0)) -> SimplyConnectedDomain:
    outer.check_positive()
    center = np.asarray(center, dtype=float)
    R_m, R_M, a = polar_constants(outer)
    return SimplyConnectedDomain(outer, discretize_star(outer, _default_m(m_out), center=center), center, R_m, R_M, a)


def annulus_domain(spec: AnnulusSpec, m_out: int | None = None, m_in: int | None = None) -> DoublyConnectedDomain:
    """Planar (n = 2) eccentric or concentric annulus from an AnnulusSpec."""
    if spec.n != 2:
        raise ValueError("only planar annuli can be discretized")
    return build_domain(EccentricCircle(spec.R2, spec.d), spec.R1, m_out, m_in)


def boundary_distance(domain: SimplyConnectedDomain, points, spacing: float,
                      upper: float = np.inf) -> np.ndarray:
    """Euclidean distance from ``points`` to the boundary of ``domain``.

    The outer curve is resampled so that consecutive nodes are at most
    ``spacing`` apart; the hole distance is exact. Distances to the outer
    curve beyond ``upper`` are reported as ``inf``, which makes the search
    much cheaper when only a band test is needed.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    length = domain.perimeter()
    m = max(64, int(np.ceil(length / spacing)))
    m += m % 2
    dense = discretize_star(domain.curve, m, center=domain.center).points
    dist, _ = cKDTree(dense).query(points, distance_upper_bound=upper)
    if domain.inner is not None:
        r, _ = domain.polar(points)
        dist = np.minimum(dist, np.abs(r - domain.R1))
    return dist


def is_convex(curve: PolarCurve, samples: int = CONSTANT_GRID, rtol: float = 1e-12) -> bool:
    """Curvature sign test ``rho^2 + 2 rho'^2 - rho rho'' >= 0`` on a dense grid.

    Isolated zero-curvature points (e.g. ``1 + 0.2 cos 2t`` at ``t = pi/2``)
    are allowed up to ``rtol`` relative to ``max rho^2``.
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    r, dr, d2r = curve.rho(theta), curve.drho(theta), curve.d2rho(theta)
    k = r * r + 2 * dr * dr - r * d2r
    return bool(np.all(k >= -rtol * np.max(r * r)))


@dataclass(frozen=True)
class RevolutionProfile:
    """Warping function h of a metric ``dr^2 + h(r)^2 g_sphere`` on [0, L]."""

    h: Callable
    L: float
    n: int = 2
    samples: int = 2001

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("profile length L must be positive")
        r = np.linspace(0.0, self.L, self.samples)
        v = np.asarray(self.h(r), dtype=float)
        if abs(v[0]) > 1e-12:
            raise ValueError("profile must satisfy h(0) = 0")
        if np.any(np.diff(v) <= 0):
            raise ValueError("profile must be strictly increasing")
        step = 1e-6 * self.L
        slope = (float(self.h(step)) - float(self.h(0.0))) / step
        if abs(slope - 1.0) > 1e-4:
            raise ValueError(f"profile must satisfy h'(0) = 1, got {slope:.6g}")

    def __call__(self, r):
        return self.h(r)

    @classmethod
    def euclidean(cls, L: float = np.inf, n: int = 2) -> "RevolutionProfile":
        return cls(lambda r: np.asarray(r, dtype=float) * 1.0, 1e6 if not np.isfinite(L) else L, n)

    @classmethod
    def spherical(cls, n: int = 2) -> "RevolutionProfile":
        # strictly increasing only up to the equator
        return cls(np.sin, np.pi / 2 - 1e-9, n)

    @classmethod
    def hyperbolic(cls, L: float = 10.0, n: int = 2) -> "RevolutionProfile":
        return cls(np.sinh, L, n)
