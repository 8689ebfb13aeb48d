"""Periodic orbits of N-body type difference equations by action minimization."""
from ._backend import BACKEND
from .action import ActionReport, EnergySeries, Residual, action, discrete_energy, residual_n1
from .core import (DomainError, PairSeparation, ProblemSpec, SingularityError, SpecError,
                   Trajectory, interpolate, min_separation, refine)
from .optimizer import OptimizerConfig, OrbitReport, minimize, random_init
from .potential import (cutoff_phi, pair_force, pair_potential, regularized_pair_force,
                        regularized_pair_potential, total_potential)
from .reference import LagrangeOrbit, compare_to_flow, rk4_flow, sample_lagrange
from .symmetry import Block, SymmetrySpec, check_symmetry, reconstruct, reduce_gradient, restrict

__version__ = "0.1.0"
