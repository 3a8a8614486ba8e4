"""Numerical toolkit for multiplication by a finite Blaschke product on
weighted coefficient spaces: shell decompositions, the commutant as matrices
of multipliers, and reducing-subspace projections, all at finite truncation
degree with every identity turned into a measurable residual."""

from .blaschke import (
    BlaschkeProduct,
    ModelSpaceBasis,
    blaschke_factor_taylor,
    model_basis,
    reproducing_kernel,
)
from .commutant import (
    CommutantOperator,
    IdempotentReport,
    MultiplierMatrix,
    apply_formula,
    build,
    commutation_residual,
    cowen_residual,
    extract_symbols,
    idempotent_residual,
    symbols_to_matrix,
)
from .config import DEFAULT, Settings, safe_degree
from .ortho import XSpaceChain, block_matrix, k_spaces, selfadjoint_block_check, x_spaces
from .reducing import (
    IntertwinerJ,
    SubspaceProjection,
    hyperinvariance_check,
    intertwining_residual,
    mobius_power_reducing_projection,
    monomial_reducing_projection,
    projection_from_basis,
    projection_defects,
    reducing_residual,
    shell_shift_residual,
    shift_equiv_general,
    shift_equiv_monomial,
    unitarity_defect,
)
from .report import CheckRecord, Report, parse_json, render
from .spaces import (
    OperatorMatrix,
    TaylorPoly,
    WeightAlpha,
    apply,
    compose_truncated,
    multiply,
    toeplitz_matrix,
    weighted_adjoint,
    weighted_inner,
    weighted_norm,
)
from .wold import (
    ShellDecomposition,
    analyze,
    analyze_by_least_squares,
    b_norm,
    norm_equivalence_ratio,
    synthesize,
)

__version__ = "0.1.0"
