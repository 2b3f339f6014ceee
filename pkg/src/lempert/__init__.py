"""Numerical toolkit for holomorphic retracts of classical Lempert domains.

The package bundles membership gauges for the Lie ball, the symmetric 2x2
matrix ball, the tetrablock and friends (:mod:`lempert.domains`), the
explicit holomorphic maps between them (:mod:`lempert.maps`), every
retraction family with a generic numeric verifier
(:mod:`lempert.retractions`), invariant-distance bounds
(:mod:`lempert.metrics`) and executable inequality suites
(:mod:`lempert.verify`), all exposed through the ``lempert`` CLI
(:mod:`lempert.cli`).
"""

from .domains import (
    BoundarySample,
    DomainDescriptor,
    SymMat2,
    ball,
    disc,
    ellipsoid,
    gauge_value,
    in_ball,
    in_closure,
    in_disc,
    in_ellipsoid,
    in_lie_ball,
    in_polydisc,
    in_riii2,
    in_sym_bidisc,
    in_tetrablock,
    indicatrix_ball,
    indicatrix_gauge,
    lie_ball,
    lie_norm,
    matrix_ball,
    membership,
    polydisc,
    sample_domain,
    sample_shilov_lie,
    sym2_singular_values,
    sym_bidisc,
    tetrablock,
)
from .errors import BranchAmbiguityError, DomainViolation
from .maps import (
    AffineSlice,
    FiberResult,
    MapDescriptor,
    ball_moebius,
    bidisc_to_lie2,
    ellipsoid_power,
    ellipsoid_root,
    is_tetra_critical,
    lie2_to_bidisc,
    lie3_to_matrix,
    make_map,
    matrix_ball_aut,
    matrix_to_lie3,
    matrix_to_tetra,
    symmetrization,
    tetra_fiber,
    tetra_jacobian_det,
    tetra_left_inverse,
)
from .metrics import (
    BidiscGeodesic,
    BoundPair,
    DiscMap,
    ball_geodesic,
    bidisc_geodesic,
    boundary_gauge_max,
    carath_lower,
    disc_feasible,
    lempert_upper,
    poincare,
    polydisc_geodesic,
    pushforward_geodesic_check,
    royal_geodesic,
    sandwich,
)
from .report import CheckResult, VerificationReport
from .retractions import (
    RetractionSpec,
    ball_slice_retraction,
    bidisc_blend_retraction,
    bidisc_graph_retraction,
    compose_retracts_check,
    ellipsoid_lift,
    indicatrix_plane_retraction,
    indicatrix_slope_retraction,
    left_inverse_composition_check,
    lie_even_retraction,
    make_retraction,
    matrix_ball_lift,
    tetra_royal_retraction,
    tetra_symmetric_retraction,
    verify_retraction,
)
from .verify import (
    FeasibilityResult,
    LinearMap3,
    PlaneSpec,
    affine_disc_inequality,
    affine_disc_suite,
    boundary_decay_suite,
    gauge_operator_norm,
    graph_boundary_decay_check,
    lie3_linear_retract_obstruction,
    lie3_obstruction_suite,
    linear_retract_feasibility,
    linret_classify_suite,
    max_third_coordinate,
    projection_with_kernel,
)

__version__ = "0.1.0"
