"""Mixed Steklov-Neumann eigenvalues on doubly connected planar domains.

Harmonic in the domain, Neumann on the hole, ``du/dnu = mu u`` on the
outer boundary. Closed forms for concentric annuli, the eccentricity
integrals, a Trefftz-Galerkin solver and checks on mu_1.
"""
from .analysis import (DumbbellSpec, dumbbell_bound, eccentricity_sweep, harmonic_extension_ratio,
                       hole_shrink_sweep, isoperimetric_check, nodal_suite, sandwich_bounds, sandwich_constants)
from .closed_forms import mu1_annulus, mu_l_concentric
from .geometry import (AnnulusSpec, EccentricCircle, RevolutionProfile, StarPolarCurve, annulus_domain,
                       build_domain, build_simply_connected, polar_constants)
from .kernels import BACKEND
from .lemmas import LemmaQuadratureConfig, lemma_values, rayleigh_bound_theta
from .nodal import count_nodal_domains
from .solver import HarmonicBasis, SolverError, SolverOptions, solve

__version__ = "0.1.0"

__all__ = [
    "AnnulusSpec",
    "BACKEND",
    "DumbbellSpec",
    "EccentricCircle",
    "HarmonicBasis",
    "LemmaQuadratureConfig",
    "RevolutionProfile",
    "SolverError",
    "SolverOptions",
    "StarPolarCurve",
    "annulus_domain",
    "build_domain",
    "build_simply_connected",
    "count_nodal_domains",
    "dumbbell_bound",
    "eccentricity_sweep",
    "harmonic_extension_ratio",
    "hole_shrink_sweep",
    "isoperimetric_check",
    "lemma_values",
    "mu1_annulus",
    "mu_l_concentric",
    "nodal_suite",
    "polar_constants",
    "rayleigh_bound_theta",
    "sandwich_bounds",
    "sandwich_constants",
    "solve",
]
