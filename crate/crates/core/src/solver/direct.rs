use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::CoefficientVector;
use crate::linalg::sorted_eigen;
use crate::loss::LossKind;
use crate::objective::{learning_functional, ProblemSpec};

/// Systems with a condition estimate above this are reported as singular.
const MAX_CONDITION: f64 = 1e14;

/// The representer system for least-squares loss, scaled by `l·γ_A`:
/// `(l γ_A I + J_C K + l γ_I M K) a = ỹ`.
pub fn least_squares_system(spec: &ProblemSpec) -> (DMatrix<f64>, DVector<f64>) {
    let n = spec.n();
    let l = spec.l() as f64;
    let dims = spec.dims();
    let k = spec.gram().data();
    let mut a = DMatrix::identity(n, n) * (l * spec.gamma_a());
    let mut rhs = DVector::zeros(n);
    for (j, y) in spec.labels().iter().enumerate() {
        let c = spec.combination(j);
        let ctc = c.transpose() * c;
        let rj = dims.range(j);
        let rows = &ctc * k.rows(rj.start, rj.len());
        let mut target = a.rows_mut(rj.start, rj.len());
        target += rows;
        rhs.rows_mut(rj.start, rj.len())
            .copy_from(&(c.transpose() * y));
    }
    if spec.gamma_i() > 0.0 {
        a += spec.regularizer().matrix() * k * (l * spec.gamma_i());
    }
    (a, rhs)
}

fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Direct solve of the least-squares representer system.
pub fn solve_ls(spec: &ProblemSpec) -> Result<CoefficientVector> {
    if spec.loss() != LossKind::LeastSquares {
        return Err(Error::UnsupportedLoss {
            kind: spec.loss(),
            what: "direct linear solve".into(),
        });
    }
    let (a, rhs) = least_squares_system(spec);
    let condition = condition_estimate(&a);
    if !(condition < MAX_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let lu = a.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular { condition })?;
    // one step of iterative refinement
    let r = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(CoefficientVector::new(x))
}

/// Half-width of the cube `[-δ, δ]^N` known to contain a global minimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    pub delta: f64,
    /// Least eigenvalue of the Gram matrix.
    pub lambda_min: f64,
    /// `I(0)`.
    pub i0: f64,
    /// All labels vanish, so `a = 0` is the global minimizer.
    pub trivial: bool,
}

/// `δ = sqrt(I(0)/(γ_A λ_min))`.
///
/// Any `a` outside the cube has `I(a) ≥ γ_A λ_min ‖a‖²_∞ > I(0)` because the
/// loss term is nonnegative and `aᵀKa ≥ λ_min ‖a‖²_2 ≥ λ_min ‖a‖²_∞`.
pub fn delta_bound(spec: &ProblemSpec) -> Result<DeltaBound> {
    match spec.loss() {
        LossKind::ExponentialLeastSquares | LossKind::LeastSquares | LossKind::Sigmoid => {}
        kind => {
            return Err(Error::UnsupportedLoss {
                kind,
                what: "search-cube bound".into(),
            })
        }
    }
    let eig = sorted_eigen(spec.gram().data());
    let lambda_min = eig.values[0];
    let lambda_max = eig.values[eig.values.len() - 1];
    if lambda_min <= 1e-10 * lambda_max.max(1.0) {
        return Err(Error::DegenerateGram { lambda_min });
    }
    let i0 = learning_functional(spec, &CoefficientVector::zeros(spec.n()))?;
    let trivial = spec.labels().iter().all(|y| y.iter().all(|&v| v == 0.0))
        && spec.loss() != LossKind::Sigmoid;
    let delta = if trivial {
        0.0
    } else {
        (i0 / (spec.gamma_a() * lambda_min)).sqrt()
    };
    Ok(DeltaBound {
        delta,
        lambda_min,
        i0,
        trivial,
    })
}
