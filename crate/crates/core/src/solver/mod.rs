//! Solvers for the representer systems.
//!
//! Least-squares problems reduce to one dense linear system ([`solve_ls`]).
//! Exponential least-squares problems are nonconvex; [`multistart_solve`]
//! bounds the search to the cube `[-δ, δ]^N` that must contain a global
//! minimizer, seeds a Latin hypercube of starts inside it, runs a local
//! box-constrained Newton solve from each, and keeps the best admissible
//! finish.

mod direct;
mod lhs;
mod multistart;
mod newton;

pub use direct::{delta_bound, least_squares_system, solve_ls, DeltaBound};
pub use lhs::lhs_sample;
pub(crate) use multistart::functional_grad_inf;
pub use multistart::{multistart_solve, SolveReport, StartRecord};
pub use newton::{
    local_minimize, local_residual_solve, projected_gradient, LocalOutcome, TracePoint,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Direct linear solve (least-squares loss).
    Ls,
    /// Multistart search (exponential least-squares loss).
    Els,
}

/// What each multistart local solve drives to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerObjective {
    /// Minimize `½‖H(a)‖²` for the paper-faithful residual map.
    PaperResidual,
    /// Minimize the learning functional `I(a)` directly.
    Functional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub mode: SolveMode,
    pub inner: InnerObjective,
    pub lhs_count: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol_opt: f64,
    pub tol_step: f64,
    pub damping_init: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            mode: SolveMode::Els,
            inner: InnerObjective::PaperResidual,
            lhs_count: 100,
            seed: 0,
            max_iters: 500,
            tol_opt: 1e-6,
            tol_step: 1e-12,
            damping_init: 1e-3,
            armijo_c: 1e-4,
            backtrack: 0.5,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.lhs_count == 0 {
            return bad("lhs_count must be at least 1".into());
        }
        if !(self.tol_opt > 0.0) {
            return bad(format!("tol_opt must be positive, got {}", self.tol_opt));
        }
        if !(self.tol_step >= 0.0) {
            return bad(format!(
                "tol_step must be nonnegative, got {}",
                self.tol_step
            ));
        }
        if !(self.damping_init > 0.0) {
            return bad(format!(
                "damping_init must be positive, got {}",
                self.damping_init
            ));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!(
                "armijo_c must lie in (0, 1), got {}",
                self.armijo_c
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad(format!(
                "backtrack must lie in (0, 1), got {}",
                self.backtrack
            ));
        }
        Ok(())
    }
}
