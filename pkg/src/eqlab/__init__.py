"""Linear stability of relative equilibria of the Newtonian n-body problem.

Two independent routes are provided: the spectrum of the linearized flow on
the symplectically reduced space, and the electromagnetic-curvature test of
the planar quadratic model applied plane by plane.
"""
from .config import DEFAULT, Tolerances
from .errors import CollisionError, EqlabError, NumericalError, PreconditionError
from .nbody import (CentralConfiguration, Configuration, MassSystem, build_lagrange,
                    build_rhombus, build_square, cc_residual, gradient, hessian, incline,
                    normalize, potential, restricted_hessian)
from .linearization import LinearizedRE, RotatingFrame, linearize, make_frame, rotating_hamiltonian_data
from .reduction import (NoSplit, PlaneSplit, ReducedPlanarSystem, SymplecticSplit, build_split,
                        reduce_planar, split_into_symplectic_planes)
from .spectral import (StabilityVerdict, classify, find_threshold, routh_holds, spectrum,
                       sweep_inclination)
from .emcurv import (QuadModel2D, ZeroSetClass, curvature, loop_action, mane_certificate,
                     min_curvature_over_directions, stability_test, toy_linear_system, zero_set)
from .apps import four_body_pipeline, lagrange_pipeline, prop52_verdict

__version__ = "0.1.0"
