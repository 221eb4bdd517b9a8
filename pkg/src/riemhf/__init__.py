"""Riemannian Hartree-Fock orbital optimization on periodic spectral grids.

Minimizes the restricted Hartree-Fock energy over Sobolev-orbital vectors
constrained to the Stiefel manifold St(N) (or its Grassmann quotient),
using resolvent-based gradients, Sylvester-equation tangent projections,
Lowdin retraction, a kinetic-inverse preconditioner, Armijo steepest
descent, preconditioned nonlinear CG with Powell restarts and a
preconditioned SCF fixed-point baseline.
"""

from .grid import Field, Grid, KernelSpec, apply_kernel, combine, create_grid, inner_product, multiply, sample
from .orbitals import OrbitalVector, lowdin_orthonormalize
from .molecule import (
    AtomicGaussians,
    Molecule,
    RandomGaussians,
    initial_guess,
    load_molecule,
    nuclear_potential,
    nuclear_repulsion,
)
from .hf import HfProblem, energy, euclidean_gradient, fock_matrix, one_body, potential_action, two_body
from .stiefel import (
    TangentVector,
    lowdin_retract,
    precondition,
    project_tangent,
    riemannian_gradient,
    solve_sym_sylvester,
    transport,
)
from .grassmann import (
    HorizontalVector,
    grassmann_gradient,
    grassmann_precondition,
    grassmann_transport,
    horizontal_project,
    solve_skew_sylvester,
)
from .optimize import (
    CgParams,
    LineSearchParams,
    OptimizeResult,
    OptimizerTrace,
    StopCriteria,
    armijo_linesearch,
    conjugate_gradient,
    scf_fixed_point,
    steepest_descent,
)

__version__ = "0.1.0"
