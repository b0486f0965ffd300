//! Box-constrained damped Newton iterations on `[-δ, δ]^N`.
//!
//! Each iteration fixes the coordinates sitting on a bound with the gradient
//! pushing outward, solves `(H_ff + λI) p = -g_f` on the rest, and runs an
//! Armijo backtracking search along the clamped path `clamp(a + t p)`. The
//! damping `λ` grows tenfold whenever the shifted matrix is not positive
//! definite or no acceptable step is found, and halves after each accepted
//! step without dropping below `damping_init`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::Result;
use crate::kernel::CoefficientVector;
use crate::linalg::inf_norm;
use crate::objective::{
    gradient_i, hessian_i, jacobian_h, learning_functional, residual_h, ProblemSpec,
    ResidualVariant,
};

use super::SolveConfig;

const MAX_BACKTRACKS: usize = 40;
const MAX_DAMPING: f64 = 1e20;

/// One row of an iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    /// `I(a)` at the iterate.
    pub objective: f64,
    /// First-order optimality measure of the inner problem.
    pub grad_inf: f64,
}

/// Result of one local solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOutcome {
    pub a: CoefficientVector,
    pub objective: f64,
    pub grad_inf: f64,
    pub iters: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

/// A twice-differentiable objective on coefficient space.
trait SmoothObjective {
    fn value(&self, a: &DVector<f64>) -> Result<f64>;
    /// Gradient and a symmetric curvature matrix.
    fn derivatives(&self, a: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)>;
    fn gradient(&self, a: &DVector<f64>) -> Result<DVector<f64>>;
    /// Extra stopping test evaluated at every iterate.
    fn solved(&self, _a: &DVector<f64>) -> Result<bool> {
        Ok(false)
    }
}

struct Functional<'a>(&'a ProblemSpec);

impl SmoothObjective for Functional<'_> {
    fn value(&self, a: &DVector<f64>) -> Result<f64> {
        learning_functional(self.0, &CoefficientVector::new(a.clone()))
    }

    fn derivatives(&self, a: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let c = CoefficientVector::new(a.clone());
        Ok((gradient_i(self.0, &c)?, hessian_i(self.0, &c)?))
    }

    fn gradient(&self, a: &DVector<f64>) -> Result<DVector<f64>> {
        gradient_i(self.0, &CoefficientVector::new(a.clone()))
    }
}

/// `½‖H(a)‖²` with the Gauss–Newton curvature `JᵀJ`.
struct ResidualNorm<'a> {
    spec: &'a ProblemSpec,
    variant: ResidualVariant,
    root_tol: f64,
}

impl SmoothObjective for ResidualNorm<'_> {
    fn value(&self, a: &DVector<f64>) -> Result<f64> {
        let h = residual_h(self.spec, &CoefficientVector::new(a.clone()), self.variant)?;
        Ok(0.5 * h.norm_squared())
    }

    fn derivatives(&self, a: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let c = CoefficientVector::new(a.clone());
        let h = residual_h(self.spec, &c, self.variant)?;
        let j = jacobian_h(self.spec, &c, self.variant)?;
        let jt = j.transpose();
        Ok((&jt * h, &jt * j))
    }

    fn gradient(&self, a: &DVector<f64>) -> Result<DVector<f64>> {
        let c = CoefficientVector::new(a.clone());
        let h = residual_h(self.spec, &c, self.variant)?;
        Ok(jacobian_h(self.spec, &c, self.variant)?.transpose() * h)
    }

    fn solved(&self, a: &DVector<f64>) -> Result<bool> {
        let h = residual_h(self.spec, &CoefficientVector::new(a.clone()), self.variant)?;
        Ok(inf_norm(&h) <= self.root_tol)
    }
}

fn clamp_into(a: &DVector<f64>, delta: f64) -> DVector<f64> {
    a.map(|x| x.clamp(-delta, delta))
}

/// `P(a - g) - a`, zero exactly at first-order stationary points of the box problem.
pub fn projected_gradient(a: &DVector<f64>, g: &DVector<f64>, delta: f64) -> DVector<f64> {
    DVector::from_iterator(
        a.len(),
        a.iter()
            .zip(g.iter())
            .map(|(&x, &gx)| (x - gx).clamp(-delta, delta) - x),
    )
}

fn free_indices(a: &DVector<f64>, g: &DVector<f64>, delta: f64) -> Vec<usize> {
    let eps = 1e-12 * delta.max(1.0);
    (0..a.len())
        .filter(|&i| {
            let at_lower = a[i] <= -delta + eps && g[i] > 0.0;
            let at_upper = a[i] >= delta - eps && g[i] < 0.0;
            !(at_lower || at_upper)
        })
        .collect()
}

fn damped_step(
    curvature: &DMatrix<f64>,
    g: &DVector<f64>,
    free: &[usize],
    lambda: f64,
) -> Option<DVector<f64>> {
    let m = free.len();
    let mut h = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for (r, &i) in free.iter().enumerate() {
        rhs[r] = -g[i];
        for (c, &j) in free.iter().enumerate() {
            h[(r, c)] = curvature[(i, j)];
        }
        h[(r, r)] += lambda;
    }
    let p_free = Cholesky::new(h)?.solve(&rhs);
    let mut p = DVector::zeros(g.len());
    for (r, &i) in free.iter().enumerate() {
        p[i] = p_free[r];
    }
    Some(p)
}

fn minimize<O: SmoothObjective>(
    problem: &O,
    spec: &ProblemSpec,
    a0: &CoefficientVector,
    delta: f64,
    cfg: &SolveConfig,
    grad_tol: f64,
) -> Result<LocalOutcome> {
    let mut a = clamp_into(a0.as_vector(), delta);
    let mut value = problem.value(&a)?;
    let mut lambda = cfg.damping_init;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    let mut grad_inf;

    loop {
        let (g, curvature) = problem.derivatives(&a)?;
        grad_inf = inf_norm(&projected_gradient(&a, &g, delta));
        trace.push(TracePoint {
            iter: iters,
            objective: learning_functional(spec, &CoefficientVector::new(a.clone()))?,
            grad_inf,
        });
        if grad_inf <= grad_tol || problem.solved(&a)? {
            converged = true;
            break;
        }
        if iters >= cfg.max_iters {
            break;
        }
        let free = free_indices(&a, &g, delta);

        let mut accepted = None;
        while lambda <= MAX_DAMPING {
            let Some(p) = damped_step(&curvature, &g, &free, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let mut t = 1.0;
            for _ in 0..MAX_BACKTRACKS {
                let trial = clamp_into(&(&a + &p * t), delta);
                let step = &trial - &a;
                let decrease = g.dot(&step);
                if decrease < 0.0 {
                    let trial_value = problem.value(&trial)?;
                    if trial_value <= value + cfg.armijo_c * decrease {
                        accepted = Some((trial, trial_value, step));
                        break;
                    }
                }
                t *= cfg.backtrack;
            }
            if accepted.is_some() {
                break;
            }
            lambda *= 10.0;
        }

        let Some((trial, trial_value, step)) = accepted else {
            // no descent left at any damping: stalled
            break;
        };
        iters += 1;
        a = trial;
        value = trial_value;
        lambda = (lambda * 0.5).max(cfg.damping_init);
        if inf_norm(&step) <= cfg.tol_step {
            let g = problem.gradient(&a)?;
            grad_inf = inf_norm(&projected_gradient(&a, &g, delta));
            trace.push(TracePoint {
                iter: iters,
                objective: learning_functional(spec, &CoefficientVector::new(a.clone()))?,
                grad_inf,
            });
            converged = true;
            break;
        }
    }

    let a = CoefficientVector::new(a);
    Ok(LocalOutcome {
        objective: learning_functional(spec, &a)?,
        a,
        grad_inf,
        iters,
        converged,
        trace,
    })
}

/// Minimizes the learning functional over `[-δ, δ]^N` from `a0` with the
/// exact Hessian as the Newton model.
pub fn local_minimize(
    spec: &ProblemSpec,
    a0: &CoefficientVector,
    delta: f64,
    cfg: &SolveConfig,
) -> Result<LocalOutcome> {
    minimize(&Functional(spec), spec, a0, delta, cfg, cfg.tol_opt)
}

/// Minimizes `½‖H(a)‖²` over `[-δ, δ]^N` from `a0` (projected
/// Levenberg–Marquardt). `grad_inf` in the outcome is the projected gradient of
/// `½‖H‖²`; `objective` is still `I(a)`.
pub fn local_residual_solve(
    spec: &ProblemSpec,
    a0: &CoefficientVector,
    delta: f64,
    variant: ResidualVariant,
    cfg: &SolveConfig,
) -> Result<LocalOutcome> {
    let tight = 1e-3 * cfg.tol_opt;
    let problem = ResidualNorm {
        spec,
        variant,
        root_tol: tight,
    };
    minimize(&problem, spec, a0, delta, cfg, tight)
}
