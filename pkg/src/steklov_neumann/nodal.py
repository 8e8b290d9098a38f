"""Nodal-domain counting on a uniform grid by union-find labelling."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .geometry import boundary_distance


@dataclass(frozen=True)
class NodalReport:
    resolution: int
    count: int
    sizes: tuple
    zero_tol: float
    band_width: float
    samples: int


@dataclass(frozen=True)
class InteriorGrid:
    """Grid samples kept for sign classification, reusable across functions."""

    n: int
    spacing: float
    points: np.ndarray
    index: np.ndarray
    band_cells: int


def interior_grid(domain, n: int = 256, band_cells: int = 2) -> InteriorGrid:
    """Square n x n grid over the outer bounding box, minus a boundary band.

    Samples outside the domain or within ``band_cells`` grid spacings of the
    boundary are excluded.
    """
    if n < 256:
        raise ValueError("grid resolution must be at least 256")
    pts = domain.outer.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    side = float(np.max(hi - lo))
    mid = 0.5 * (lo + hi)
    h = side / (n - 1)
    xs = mid[0] - 0.5 * side + h * np.arange(n)
    ys = mid[1] - 0.5 * side + h * np.arange(n)
    X, Y = np.meshgrid(xs, ys)
    P = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.flatnonzero(domain.contains(P))
    if idx.size:
        band = band_cells * h
        far = boundary_distance(domain, P[idx], spacing=h / 4, upper=2 * band) > band
        idx = idx[far]
    if idx.size == 0:
        raise ValueError("no interior grid samples; increase the grid resolution")
    return InteriorGrid(n, h, P[idx], idx, band_cells)


def sign_field(domain, evaluator: Callable, n: int = 256, zero_tol: float = 1e-6, band_cells: int = 2,
               grid: InteriorGrid | None = None):
    """Sign of ``evaluator`` on an n x n grid covering ``domain``.

    Cells outside the domain, inside the boundary band, or with
    ``|u| <= zero_tol * max|u|`` are 0. Returns ``(sign, spacing)``.
    """
    grid = grid or interior_grid(domain, n, band_cells)
    u = np.asarray(evaluator(grid.points), dtype=float)
    scale = np.max(np.abs(u))
    s = np.zeros(grid.n * grid.n, dtype=np.int8)
    s[grid.index] = np.where(u > zero_tol * scale, 1, np.where(u < -zero_tol * scale, -1, 0))
    return s.reshape(grid.n, grid.n), grid.spacing


def count_nodal_domains(domain, evaluator: Callable, n: int = 256, zero_tol: float = 1e-6,
                        band_cells: int = 2, grid: InteriorGrid | None = None) -> NodalReport:
    """Number of 4-connected sign components of ``evaluator`` inside ``domain``."""
    grid = grid or interior_grid(domain, n, band_cells)
    sign, h = sign_field(domain, evaluator, grid=grid)
    labels, count = kernels.label_components(sign)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    return NodalReport(grid.n, int(count), tuple(int(v) for v in sizes), zero_tol, grid.band_cells * h,
                       int(np.count_nonzero(sign)))


def mode_evaluator(solution, coefficients) -> Callable:
    """Closure evaluating the harmonic expansion with the given coefficients."""
    c = np.asarray(coefficients, dtype=float)
    return lambda p: solution.basis.combine(c, p)
