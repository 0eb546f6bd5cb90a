//! Variational orbit solvers: maximal-perimeter periodic orbits, truncated
//! heteroclinic segments, monodromy and the quadratic-form diagnostics.

mod chain;
mod heteroclinic;
mod monodromy;
mod periodic;
mod quadratic;

pub use heteroclinic::{solve_heteroclinic, HeteroclinicSegment, HeteroclinicSummary};
pub use monodromy::{
    eigendata, finite_difference_monodromy, monodromy, monodromy_at, orbit_jacobians, Eigendata,
};
pub use periodic::{
    check_rotation, equal_spacing, normalize_base, solve_configuration, solve_periodic, ExportPoint, OrbitExport,
    PeriodicOrbit, SolveOptions,
};
pub use quadratic::{
    c_coefficients, quadratic_constants_at, w_matrix, w_matrix_at, z_vectors_at,
    QuadraticConstants, WMatrix,
};
