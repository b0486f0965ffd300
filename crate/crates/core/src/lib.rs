//! Localized semisupervised, manifold-regularized, multiview learning with
//! operator-valued kernels whose output spaces vary from point to point.
//!
//! The crate is organized bottom-up:
//!
//! - [`kernel`]: block kernels, Gram assembly, PSD checks, Kolmogorov
//!   factorization and section evaluation.
//! - [`regularizer`]: graph weights, Laplacians and the regularization
//!   operator `M`.
//! - [`loss`]: loss functions and their derivatives.
//! - [`objective`]: the learning functional, its gradient and Hessian, and
//!   the residual map `H` with its Jacobian.
//! - [`solver`]: the direct least-squares solve and the multistart search
//!   for the exponential least-squares loss.
//! - [`config`] and [`run`]: run configuration files and artifact output for
//!   the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod kernel;
mod linalg;
pub mod loss;
pub mod objective;
pub mod regularizer;
pub mod run;
pub mod solver;

pub use error::{Error, Result};
pub use kernel::{
    assemble_gram, check_psd, evaluate_section, kernel_block, kolmogorov_factor, rkhs_norm_sq,
    BlockGram, CoefficientVector, InputPoint, KernelConfig, KernelKind, KolmogorovFactor, PsdCheck,
    SpaceDims, PSD_TOL,
};
pub use loss::{loss_gradient, loss_hessian, loss_value, LossKind};
pub use objective::{
    coupling_matrix, extended_functional, gradient_i, hessian_i, jacobian_h, learning_functional,
    project_onto_span, residual_h, ProblemInputs, ProblemSpec, ResidualVariant,
};
pub use regularizer::{
    between_view_for_layout, between_view_operator, combine_regularizer, gaussian_weights,
    graph_laplacian, within_view_embed, GraphWeights, LaplacianMatrix, RegularizerConfig,
    RegularizerOperator,
};
pub use solver::{
    delta_bound, lhs_sample, local_minimize, local_residual_solve, multistart_solve, solve_ls,
    DeltaBound, InnerObjective, LocalOutcome, SolveConfig, SolveMode, SolveReport, StartRecord,
};
