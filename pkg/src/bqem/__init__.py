"""Biquaternion electromagnetics.

Complex-quaternion algebra, closed-form fundamental solutions of the
perturbed Dirac operators, a method-of-fundamental-solutions solver for
Maxwell scattering in chiral and achiral media, the causal Green function
of the time-dependent chiral Maxwell operator, quaternionic forms of
Maxwell's equations in inhomogeneous media, and grid-based verification of
the operator factorizations connecting them.
"""

__version__ = "0.1.0"

from .algebra import (
    Biquaternion,
    I1,
    I2,
    I3,
    ONE,
    complex_conj,
    cross,
    dot,
    mul,
    quat_conj,
    sc,
    vec,
)
from .chiral_time import (
    GreenIntermediates,
    apply_M,
    bessel_j,
    green_function,
    green_intermediates,
    green_residual,
    maxwell_equivalence_residual,
)
from .diffops import (
    PotentialSlot,
    antiderivative,
    apply_D,
    apply_D_shifted,
    coefficients_to_vekua,
    conductivity_factorization_residual,
    darboux_transform,
    dirac_residual,
    embed_scalar,
    generating_quartet,
    helmholtz_factorization_residual,
    left_mult,
    right_mult,
    schrodinger_factorization_residual,
    vekua_coefficient_identity_residual,
    vekua_consequences,
    vekua_residual,
)
from .grids import (
    Lattice,
    QuaternionGrid,
    ScalarGrid,
    SpaceTimeGrid,
    SpaceTimeLattice,
)
from .inhomog import (
    EMState,
    MediumFields,
    build_medium,
    manufactured_solution,
    maxwell_residuals,
    medium_from_expressions,
    quaternionic_residual,
    split_residuals,
    static_residuals,
)
from .kernels import (
    ChiralMedium,
    chiral_wavenumbers,
    dipole_field,
    fundamental_solution,
    helmholtz_kernel,
    helmholtz_kernel_grad,
    vector_potential_curl,
    vector_potential_curl_curl,
)
from .scattering import (
    ConvergenceReport,
    Ellipsoid,
    MfsProblem,
    MfsSolution,
    SurfaceSamples,
    assemble_system,
    chiral_point_source,
    chiral_selftest,
    dipole_boundary_data,
    evaluate_fields,
    parametric_grid,
    run_benchmark,
    sample_surface,
    solve_dense,
    solve_problem,
    surface_frame,
)
