"""Curvature of quantization bundles: Fock-space models, sphere quantization,
parallel transport, and a hyperbolic slice pairing, with a batch CLI."""

from .linalg import (
    OdeStepper,
    QuadratureRule,
    central_difference,
    derivative,
    hermiticity_defect,
    hs_norm,
    orthonormal_columns,
    projector_from_frame,
)
from .symplectic import (
    QuadraticHamiltonian,
    cartan_split,
    chi_symbol,
    decompose_quadratic,
    hamiltonian_from_form,
    omega_pairing,
    p_minus_basis,
    p_plus_basis,
    poisson_bracket,
    standard_complex_structure,
    standard_symplectic,
)
from .fock import (
    BiPolynomial,
    FockOperator,
    FockTruncation,
    bargmann_generator,
    curvature_operator,
    flat_curvature_operator,
    hamiltonian_bipoly,
    lie_derivative,
    lie_matrix,
    project,
    verify_scalar_curvature,
)
from .sphere import (
    ChartFunction,
    GridOperator,
    HamiltonianField,
    SectionSpace,
    SphereGrid,
    build_projector,
    chi_field,
    curvature_calibration,
    curvature_commutator,
    curvature_fd,
    harmonic_imag,
    harmonic_real,
    hamiltonian_from_chart,
    op_full,
    prequantum_generator,
    projector_curve,
    pullback_frame,
    rotation_x,
    rotation_y,
    rotation_z,
    tangent_structure,
    tangent_structure_fd,
    symbol_decay_experiment,
    toeplitz_mult,
    zonal_harmonic,
)
from .transport import (
    TransportResult,
    intertwine_check,
    parallel_transport,
    schrodinger_propagate,
    transport_residuals,
)
from .teichmuller import (
    SlicePoint,
    SliceVariation,
    h_matrix,
    metric_matrix,
    pairing_closed_form,
    pairing_trace,
    random_slice_point,
    slice_variation,
    wp_integrand,
)

__version__ = "0.1.0"
