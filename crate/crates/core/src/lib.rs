//! Direct and inverse boundary problems for the two-dimensional parabolic
//! wave equation `2ik u_z + u_xx = 0`.
//!
//! The direct problem propagates an amplitude given on a boundary semi-line to
//! an orthogonal image line ([`forward`]). The inverse problem recovers the
//! boundary amplitude from image data by discretizing a singular integral
//! equation of Cauchy type into a dense regularized system ([`discretize`],
//! [`solver`]). A second system built on the transparent boundary condition
//! serves as an independent check ([`analysis`]).

pub mod analysis;
pub mod discretize;
pub mod error;
pub mod forward;
pub mod grid;
pub mod models;
pub mod solver;

pub use discretize::{
    assemble_g, assemble_g_prime, assemble_m, assemble_pv_weights, assemble_t, eval_h, gamma_coefficient,
    tbc_weight, CornerMode, KernelMatrix, RhsKind, RhsVector, TbcMatrix, DEFAULT_CLAMP,
};
pub use error::{Error, Result};
pub use forward::{fresnel_point, fresnel_propagate, inclined_propagate};
pub use grid::{
    inverse_shear_transform, shear_transform, BoundaryLine, ComplexLine, ImageLine, PhysicalParams,
    Regularization, RegularizationMode, UniformGrid, XGrid, ZGrid,
};
pub use models::{
    eval_gaussian_boundary, eval_gaussian_boundary_dx, eval_gaussian_image, eval_parabolic_boundary,
    eval_step_boundary, GaussianBeam, ParabolicBeam, StepBeam,
};
pub use solver::{
    build_system, condition_estimate, condition_exact, solve, solve_special_imag, solve_special_real, solve_with,
    system_matrix, FactoredSystem, InverseSystem, Reconstruction, SolveOptions, SystemKind,
};

pub use num_complex::Complex64;
