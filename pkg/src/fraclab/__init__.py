"""fraclab: a desk-scale laboratory for nonlocal exterior-value problems."""

from .grid import DOF_CAP, DomainMask, Field, Grid, GridError, inner, make_grid, mask_from_predicate
from .fracops import (
    BesselMultiplier,
    OperatorKernel,
    frac_constant,
    frac_gradient_pairing,
    frac_laplacian,
    gagliardo_seminorm,
    make_bessel,
    make_kernel,
    sobolev_norm,
)
from .forms import (
    BilinearForm,
    PdoSpec,
    coercivity_margin,
    conductivity_form,
    delta_budget,
    dirichlet_form,
    pdo_form,
    potential_form,
)
from .solver import ExteriorProblem, NonCoerciveError, Solution, runge_residual, solve_adjoint, solve_exterior
from .dnmap import DNMap, alessandrini_gap, assemble_dn, dn_pairing, export_dn_csv, window_equal
from .poincare import (
    PoincareEstimate,
    cylinder_limit,
    gagliardo_quotient,
    interpolation_check,
    poincare_constant,
    rigid_invariance_check,
)
from .liouville import (
    Conductivity,
    ReconstructionResult,
    dn_comparison_gap,
    liouville_identity_gap,
    make_conductivity,
    nonuniqueness_pair,
    reconstruct_conductivity,
    schrodinger_form,
    transform,
)

__version__ = "0.1.0"
