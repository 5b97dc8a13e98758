"""Spectra of Schrodinger operators with complex potentials, and the
eigenvalue-sum and single-eigenvalue bounds they satisfy.

Pipeline: analytic potential -> grid sampling -> dense operator matrix ->
full complex spectrum -> physical-eigenvalue filter -> bound evaluation,
plus exact matrix-level invariants, analytic oracles, exclusion-region
rasters and a derivative-free saturation search.
"""

__version__ = "0.1.0"

from .constants import (
    ConstantMode,
    ConstantValue,
    classical_constant,
    cone_constant,
    corollary_constants,
    lt_constant,
    one_bound_constant,
    riesz_lift_constant,
    single_ev_constant,
)
from .discretize import (
    GridSpec,
    OperatorMatrix,
    PotentialSpec,
    PotentialTerm,
    SampledPotential,
    build_operator,
    hermitian_combination,
    potential_integral,
    sample_potential,
)
from .eigensolve import (
    ComplexSpectrum,
    FilterPolicy,
    FilteredSpectrum,
    eigenvalues_dense,
    filter_spectrum,
    hermitian_eigenvalues,
    riesz_mean_neg,
)
from .inequalities import (
    ExclusionRaster,
    InequalityReport,
    InequalityRequest,
    check_single,
    check_sum,
    cone_select,
    exclusion_region,
    lemma_check,
)
from .oracles import (
    WellSpec,
    delta_eigenvalue,
    dirichlet_laplacian_spectrum,
    square_well_eigenvalues,
)
from .optimizer import (
    FamilySpec,
    OptimizerConfig,
    OptResult,
    PipelineConfig,
    gamma_sweep,
    maximize_ratio,
    objective_ratio,
)
from .pipeline import compute_spectrum, solve_operator
