"""Riemannian geometry of fixed multilinear-rank tensor manifolds.

The package computes tangent frames, Gram matrices, second fundamental
forms and mean curvature vectors of parametrized submanifolds, specialized
to the manifolds of tensors with fixed multilinear (Tucker) rank and to the
rank-one (Segre) manifold with its hyperplane slices.
"""

from .curvature import (
    Chart,
    DegenerateChartError,
    MeanCurvature,
    TangentFrame,
    affine_reparametrization,
    fd_first_derivs,
    fd_second_derivs,
    finite_difference_derivatives,
    mean_curvature,
    normal_project,
    second_fundamental_form,
    tangent_coordinates,
    tangent_frame,
)
from .segre import (
    ConstantFunctionalError,
    DomainError,
    FunctionalDecomposition,
    NormalFrame,
    NotNormalError,
    NoWitnessError,
    ProbeCurve,
    SegrePoint,
    SliceField,
    SliceReduction,
    SliceTangencyError,
    WitnessPair,
    WitnessSearchError,
    canonical_segre_point,
    curve_pairings,
    decompose_functional,
    extremum_witness,
    independence_model_chart,
    normal_frame,
    probe_curve,
    sff_degeneracy_check,
    slice_curvature_field,
    slice_reduce,
)
from .tensors import (
    DEFAULT_RANK_TOL,
    as_tensor,
    check_rank_admissible,
    embed_block,
    flatten,
    frobenius_inner,
    frobenius_norm,
    group_action,
    is_orthogonal,
    load_tensor,
    mode_product,
    multilinear_rank,
    random_orthogonal,
    random_orthogonal_tuple,
    random_rank_r_tensor,
    save_tensor,
    singular_values_per_mode,
    tensor_from_json_dict,
    tensor_to_json_dict,
)
from .tucker import (
    AmbiguousRankError,
    CanonicalPoint,
    ChartLayout,
    GramBlockReport,
    MinimalityReport,
    canonicalize,
    chart_first_derivs_origin,
    chart_layout,
    chart_second_derivs_origin,
    gram_block_report,
    grassmann_factor,
    grassmann_factor_derivs,
    manifold_dim,
    rotation_exp,
    rotation_pairs,
    sample_rng,
    skew_generator,
    tucker_chart,
    verify_minimality,
)

__version__ = "0.1.0"
