use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::CoefficientVector;
use crate::linalg::inf_norm;
use crate::objective::{gradient_i, learning_functional, residual_h, ProblemSpec, ResidualVariant};

use super::newton::{local_minimize, local_residual_solve, projected_gradient, LocalOutcome};
use super::{delta_bound, lhs_sample, InnerObjective, SolveConfig, SolveMode, TracePoint};

/// Diagnostics for one multistart run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartRecord {
    pub start_index: usize,
    pub a0: CoefficientVector,
    pub final_a: CoefficientVector,
    pub final_objective: f64,
    /// Optimality measure of the inner problem at the finish.
    pub final_grad_inf: f64,
    /// `‖H(a)‖_∞` of the paper-faithful residual at the finish.
    pub final_resid_inf: f64,
    pub iters: usize,
    pub converged: bool,
    /// Satisfies the first-order optimality part of the admissibility test.
    pub admissible: bool,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub inner: InnerObjective,
    pub best_a: CoefficientVector,
    pub objective: f64,
    /// `‖H(best_a)‖_∞` for the paper-faithful residual.
    pub resid_paper_inf: f64,
    /// `‖P(a - ∇I) - a‖_∞` at `best_a`.
    pub grad_inf: f64,
    pub delta: f64,
    pub lambda_min: f64,
    pub i0: f64,
    /// All labels vanish and `a = 0` was returned without searching.
    pub trivial: bool,
    /// No start passed the admissibility test; `best_a` is the lowest finish.
    pub no_admissible: bool,
    pub starts_run: usize,
    pub admissible_count: usize,
    pub per_start: Vec<StartRecord>,
    pub seed: u64,
}

pub(crate) fn functional_grad_inf(
    spec: &ProblemSpec,
    a: &CoefficientVector,
    delta: f64,
) -> Result<f64> {
    let g = gradient_i(spec, a)?;
    Ok(inf_norm(&projected_gradient(a.as_vector(), &g, delta)))
}

fn run_start(
    spec: &ProblemSpec,
    index: usize,
    a0: CoefficientVector,
    delta: f64,
    cfg: &SolveConfig,
) -> Result<StartRecord> {
    let LocalOutcome {
        a,
        objective,
        grad_inf,
        iters,
        converged,
        trace,
    } = match cfg.inner {
        InnerObjective::Functional => local_minimize(spec, &a0, delta, cfg)?,
        InnerObjective::PaperResidual => {
            local_residual_solve(spec, &a0, delta, ResidualVariant::PaperFaithful, cfg)?
        }
    };
    let final_resid_inf = inf_norm(&residual_h(spec, &a, ResidualVariant::PaperFaithful)?);
    Ok(StartRecord {
        start_index: index,
        a0,
        final_a: a,
        final_objective: objective,
        final_grad_inf: grad_inf,
        final_resid_inf,
        iters,
        converged,
        admissible: grad_inf <= cfg.tol_opt,
        trace,
    })
}

/// Residual norms at or below `tol` count as equal.
fn residual_not_worse(candidate: f64, incumbent: f64, tol: f64) -> bool {
    candidate < incumbent || candidate <= tol
}

/// Applies the three-part admissibility test in start order: a first-order
/// optimal finish replaces the incumbent only if its objective is strictly
/// smaller and its residual norm is smaller (residuals below `tol_opt`
/// compare equal).
fn select(records: &[StartRecord], tol_opt: f64) -> (usize, bool) {
    let mut incumbent: Option<usize> = None;
    for (k, r) in records.iter().enumerate() {
        if !r.admissible {
            continue;
        }
        let replace = match incumbent {
            None => true,
            Some(best) => {
                let b = &records[best];
                r.final_objective < b.final_objective
                    && residual_not_worse(r.final_resid_inf, b.final_resid_inf, tol_opt)
            }
        };
        if replace {
            incumbent = Some(k);
        }
    }
    match incumbent {
        Some(k) => (k, false),
        None => {
            let k = (0..records.len())
                .min_by(|&x, &y| {
                    let (a, b) = (&records[x], &records[y]);
                    a.final_objective
                        .total_cmp(&b.final_objective)
                        .then(a.final_grad_inf.total_cmp(&b.final_grad_inf))
                        .then(a.start_index.cmp(&b.start_index))
                })
                .expect("at least one start");
            (k, true)
        }
    }
}

/// Multistart search for a global minimizer on the `δ`-cube.
pub fn multistart_solve(spec: &ProblemSpec, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if cfg.mode != SolveMode::Els {
        return Err(Error::InvalidParameter(
            "multistart search runs in els mode".into(),
        ));
    }
    let bound = delta_bound(spec)?;
    let n = spec.n();
    let residual_of = |a: &CoefficientVector| -> Result<f64> {
        Ok(inf_norm(&residual_h(
            spec,
            a,
            ResidualVariant::PaperFaithful,
        )?))
    };

    if bound.trivial {
        let zero = CoefficientVector::zeros(n);
        return Ok(SolveReport {
            mode: cfg.mode,
            inner: cfg.inner,
            objective: learning_functional(spec, &zero)?,
            resid_paper_inf: residual_of(&zero)?,
            grad_inf: functional_grad_inf(spec, &zero, 0.0)?,
            best_a: zero,
            delta: bound.delta,
            lambda_min: bound.lambda_min,
            i0: bound.i0,
            trivial: true,
            no_admissible: false,
            starts_run: 0,
            admissible_count: 0,
            per_start: Vec::new(),
            seed: cfg.seed,
        });
    }

    let starts = lhs_sample(cfg.lhs_count, n, bound.delta, cfg.seed);
    let records: Vec<StartRecord> = starts
        .into_par_iter()
        .enumerate()
        .map(|(k, a0)| run_start(spec, k, a0, bound.delta, cfg))
        .collect::<Result<_>>()?;

    let (best, no_admissible) = select(&records, cfg.tol_opt);
    let winner = &records[best];
    let best_a = winner.final_a.clone();
    log::info!(
        "start {} selected: I = {:.6e}, |H| = {:.3e}",
        winner.start_index,
        winner.final_objective,
        winner.final_resid_inf
    );
    Ok(SolveReport {
        mode: cfg.mode,
        inner: cfg.inner,
        objective: winner.final_objective,
        resid_paper_inf: winner.final_resid_inf,
        grad_inf: functional_grad_inf(spec, &best_a, bound.delta)?,
        best_a,
        delta: bound.delta,
        lambda_min: bound.lambda_min,
        i0: bound.i0,
        trivial: false,
        no_admissible,
        starts_run: records.len(),
        admissible_count: records.iter().filter(|r| r.admissible).count(),
        per_start: records,
        seed: cfg.seed,
    })
}
