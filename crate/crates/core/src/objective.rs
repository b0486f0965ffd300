//! The learning functional `I`, its derivatives, and the coefficient-space
//! residual map `H` whose roots are candidate minimizers.
//!
//! For a section in representer form `f = Σ_j K(·, x_j) a_j`, the values at
//! the data points are `f = K a` and
//!
//! ```text
//! I(a) = (1/l) Σ_{j<l} V(y_j, C_j f_j) + γ_A aᵀKa + γ_I fᵀMf.
//! ```
//!
//! Two residual maps are provided. [`ResidualVariant::PaperFaithful`] is the
//! literal nonlinear system for the exponential least-squares loss, with the
//! labeled-block coupling weighted by `exp(-‖y_j - C_j f_j‖²)` and summed over
//! labeled `j` only. [`ResidualVariant::GradientConsistent`] is the bracket
//! `B(a)` in `∇I(a) = 2γ_A K B(a)`, whose roots are exactly the stationary
//! points of `I` when `K` is nonsingular. For least squares both coincide.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    assemble_gram, check_psd, BlockGram, CoefficientVector, InputPoint, KernelConfig, SpaceDims,
    PSD_TOL,
};
use crate::linalg::psd_pseudo_solve;
use crate::loss::{loss_gradient, loss_hessian, loss_value, LossKind};
use crate::regularizer::RegularizerOperator;

/// Everything needed to build a [`ProblemSpec`].
#[derive(Debug, Clone)]
pub struct ProblemInputs {
    /// Labeled points first, then unlabeled ones.
    pub points: Vec<InputPoint>,
    /// One label per labeled point; `labels[j]` has length `dims.e(j)`.
    pub labels: Vec<DVector<f64>>,
    pub dims: SpaceDims,
    /// `e_i × d_i` combination operators for every point; identity when `None`.
    pub combinations: Option<Vec<DMatrix<f64>>>,
    pub regularizer: RegularizerOperator,
    pub gamma_a: f64,
    pub gamma_i: f64,
    pub kernel: KernelConfig,
    pub loss: LossKind,
}

/// A validated learning problem with its Gram matrix precomputed.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    points: Vec<InputPoint>,
    labels: Vec<DVector<f64>>,
    dims: SpaceDims,
    combinations: Vec<DMatrix<f64>>,
    regularizer: RegularizerOperator,
    gamma_a: f64,
    gamma_i: f64,
    kernel: KernelConfig,
    loss: LossKind,
    gram: BlockGram,
    // M·K, empty when γ_I = 0
    mk: DMatrix<f64>,
}

impl ProblemSpec {
    pub fn new(inputs: ProblemInputs) -> Result<Self> {
        let ProblemInputs {
            points,
            labels,
            dims,
            combinations,
            regularizer,
            gamma_a,
            gamma_i,
            kernel,
            loss,
        } = inputs;
        if !(gamma_a > 0.0 && gamma_a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_a must be positive, got {gamma_a}"
            )));
        }
        if !(gamma_i >= 0.0 && gamma_i.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_i must be nonnegative, got {gamma_i}"
            )));
        }
        let l = labels.len();
        if l == 0 {
            return Err(Error::InvalidParameter(
                "at least one labeled point is required".into(),
            ));
        }
        if l > points.len() {
            return Err(Error::Dimension(format!(
                "{l} labels for {} points",
                points.len()
            )));
        }
        if let Some(p) = points.first().map(|p| p.coords.len()) {
            if let Some(i) = points.iter().position(|q| q.coords.len() != p) {
                return Err(Error::Dimension(format!(
                    "point {i} has {} coordinates, expected {p}",
                    points[i].coords.len()
                )));
            }
        }
        for (j, y) in labels.iter().enumerate() {
            if y.len() != dims.e(j) {
                return Err(Error::Dimension(format!(
                    "label {j} has length {}, label space has dimension {}",
                    y.len(),
                    dims.e(j)
                )));
            }
            if loss.scalar_only() && y.len() != 1 {
                return Err(Error::Dimension(format!(
                    "{loss} loss needs scalar labels, label {j} has length {}",
                    y.len()
                )));
            }
        }
        let combinations = match combinations {
            Some(c) => {
                if c.len() != points.len() {
                    return Err(Error::Dimension(format!(
                        "{} combination operators for {} points",
                        c.len(),
                        points.len()
                    )));
                }
                for (i, ci) in c.iter().enumerate() {
                    if ci.shape() != (dims.e(i), dims.d(i)) {
                        return Err(Error::Dimension(format!(
                            "combination operator {i} is {}x{}, expected {}x{}",
                            ci.nrows(),
                            ci.ncols(),
                            dims.e(i),
                            dims.d(i)
                        )));
                    }
                }
                c
            }
            None => {
                if let Some(i) = (0..points.len()).find(|&i| dims.e(i) != dims.d(i)) {
                    return Err(Error::Dimension(format!(
                        "point {i} has label dimension {} != coefficient dimension {}; \
                         an explicit combination operator is required",
                        dims.e(i),
                        dims.d(i)
                    )));
                }
                (0..points.len())
                    .map(|i| DMatrix::identity(dims.d(i), dims.d(i)))
                    .collect()
            }
        };
        if regularizer.layout() != &dims {
            return Err(Error::Dimension(
                "regularizer layout differs from the problem layout".into(),
            ));
        }
        let gram = assemble_gram(&points, &dims, &kernel)?;
        let mk = if gamma_i > 0.0 {
            regularizer.matrix() * gram.data()
        } else {
            DMatrix::zeros(0, 0)
        };
        Ok(Self {
            points,
            labels,
            dims,
            combinations,
            regularizer,
            gamma_a,
            gamma_i,
            kernel,
            loss,
            gram,
            mk,
        })
    }

    pub fn points(&self) -> &[InputPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[DVector<f64>] {
        &self.labels
    }

    pub fn dims(&self) -> &SpaceDims {
        &self.dims
    }

    pub fn combination(&self, i: usize) -> &DMatrix<f64> {
        &self.combinations[i]
    }

    pub fn regularizer(&self) -> &RegularizerOperator {
        &self.regularizer
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_i(&self) -> f64 {
        self.gamma_i
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn gram(&self) -> &BlockGram {
        &self.gram
    }

    /// Number of labeled points.
    pub fn l(&self) -> usize {
        self.labels.len()
    }

    /// Number of unlabeled points.
    pub fn u(&self) -> usize {
        self.points.len() - self.labels.len()
    }

    pub fn n(&self) -> usize {
        self.dims.total()
    }

    fn uses_regularizer(&self) -> bool {
        self.gamma_i > 0.0
    }

    /// The same problem with another loss.
    pub fn with_loss(&self, loss: LossKind) -> Result<Self> {
        if loss.scalar_only() && self.labels.iter().any(|y| y.len() != 1) {
            return Err(Error::Dimension(format!("{loss} loss needs scalar labels")));
        }
        Ok(Self {
            loss,
            ..self.clone()
        })
    }

    fn check_len(&self, a: &CoefficientVector) -> Result<()> {
        if a.len() != self.n() {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, problem has N = {}",
                a.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// `f = K a`, the section values at all data points.
    pub fn sample(&self, a: &CoefficientVector) -> DVector<f64> {
        self.gram.data() * a.as_vector()
    }

    fn block(&self, v: &DVector<f64>, i: usize) -> DVector<f64> {
        let r = self.dims.range(i);
        v.rows(r.start, r.len()).into_owned()
    }

    /// `C_j f_j` for labeled `j`.
    fn prediction(&self, f: &DVector<f64>, j: usize) -> DVector<f64> {
        &self.combinations[j] * self.block(f, j)
    }
}

/// Which residual map to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualVariant {
    PaperFaithful,
    GradientConsistent,
}

fn functional_from_values(spec: &ProblemSpec, f: &DVector<f64>, norm_sq: f64) -> Result<f64> {
    let l = spec.l() as f64;
    let mut data_term = 0.0;
    for (j, y) in spec.labels.iter().enumerate() {
        data_term += loss_value(spec.loss, y, &spec.prediction(f, j))?;
    }
    let mut total = data_term / l + spec.gamma_a * norm_sq;
    if spec.uses_regularizer() {
        total += spec.gamma_i * f.dot(&(spec.regularizer.matrix() * f));
    }
    Ok(total)
}

/// `I(a)`.
pub fn learning_functional(spec: &ProblemSpec, a: &CoefficientVector) -> Result<f64> {
    spec.check_len(a)?;
    let f = spec.sample(a);
    let norm_sq = a.as_vector().dot(&f);
    functional_from_values(spec, &f, norm_sq)
}

/// Labeled-block vector `u` with `u_j = C_jᵀ ∇V(y_j, C_j f_j)`, zero elsewhere.
fn loss_pullback(spec: &ProblemSpec, f: &DVector<f64>) -> Result<DVector<f64>> {
    let mut u = DVector::zeros(spec.n());
    for (j, y) in spec.labels.iter().enumerate() {
        let g = loss_gradient(spec.loss, y, &spec.prediction(f, j))?;
        let r = spec.dims.range(j);
        u.rows_mut(r.start, r.len())
            .copy_from(&(spec.combinations[j].transpose() * g));
    }
    Ok(u)
}

/// The bracket `B(a)` with `∇I(a) = 2γ_A K B(a)`.
fn stationarity_bracket(spec: &ProblemSpec, a: &CoefficientVector) -> Result<DVector<f64>> {
    let f = spec.sample(a);
    let u = loss_pullback(spec, &f)?;
    let mut b = a.as_vector() + u / (2.0 * spec.l() as f64 * spec.gamma_a);
    if spec.uses_regularizer() {
        b += (spec.regularizer.matrix() * &f) * (spec.gamma_i / spec.gamma_a);
    }
    Ok(b)
}

/// Analytic `∇I(a)`.
pub fn gradient_i(spec: &ProblemSpec, a: &CoefficientVector) -> Result<DVector<f64>> {
    spec.check_len(a)?;
    if !spec.loss.is_smooth() {
        return Err(Error::UnsupportedLoss {
            kind: spec.loss,
            what: "gradient of the learning functional".into(),
        });
    }
    let b = stationarity_bracket(spec, a)?;
    Ok(spec.gram.data() * b * (2.0 * spec.gamma_a))
}

/// Block-diagonal `D` with `D_j = C_jᵀ ∇²V(y_j, C_j f_j) C_j` on labeled blocks.
fn loss_curvature(spec: &ProblemSpec, f: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = spec.n();
    let mut d = DMatrix::zeros(n, n);
    for (j, y) in spec.labels.iter().enumerate() {
        let c = &spec.combinations[j];
        let h = loss_hessian(spec.loss, y, &spec.prediction(f, j))?;
        let block = c.transpose() * h * c;
        let o = spec.dims.offset(j);
        d.view_mut((o, o), block.shape()).copy_from(&block);
    }
    Ok(d)
}

/// Exact Hessian `∇²I(a) = (1/l) K D K + 2γ_A K + 2γ_I K M K`.
pub fn hessian_i(spec: &ProblemSpec, a: &CoefficientVector) -> Result<DMatrix<f64>> {
    spec.check_len(a)?;
    if !spec.loss.is_smooth() {
        return Err(Error::UnsupportedLoss {
            kind: spec.loss,
            what: "Hessian of the learning functional".into(),
        });
    }
    let k = spec.gram.data();
    let f = spec.sample(a);
    let d = loss_curvature(spec, &f)?;
    let mut h = k * (d * k) / spec.l() as f64 + k * (2.0 * spec.gamma_a);
    if spec.uses_regularizer() {
        h += k * &spec.mk * (2.0 * spec.gamma_i);
    }
    // K·(…) is symmetric in exact arithmetic; mirror to remove rounding asymmetry
    let n = h.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = s;
            h[(j, i)] = s;
        }
    }
    Ok(h)
}

fn residual_supported(spec: &ProblemSpec) -> Result<()> {
    match spec.loss {
        LossKind::LeastSquares | LossKind::ExponentialLeastSquares => Ok(()),
        kind => Err(Error::UnsupportedLoss {
            kind,
            what: "residual map".into(),
        }),
    }
}

/// Residual map `H(a)`.
pub fn residual_h(
    spec: &ProblemSpec,
    a: &CoefficientVector,
    variant: ResidualVariant,
) -> Result<DVector<f64>> {
    spec.check_len(a)?;
    residual_supported(spec)?;
    let paper_els =
        variant == ResidualVariant::PaperFaithful && spec.loss == LossKind::ExponentialLeastSquares;
    if !paper_els {
        return stationarity_bracket(spec, a);
    }
    let f = spec.sample(a);
    let scale = 1.0 / (spec.l() as f64 * spec.gamma_a);
    let mut h = a.as_vector().clone();
    if spec.uses_regularizer() {
        h += (spec.regularizer.matrix() * &f) * (spec.gamma_i / spec.gamma_a);
    }
    let weights: Vec<f64> = spec
        .labels
        .iter()
        .enumerate()
        .map(|(j, y)| (-(y - spec.prediction(&f, j)).norm_squared()).exp())
        .collect();
    let k = spec.gram.data();
    for i in 0..spec.l() {
        let ci = &spec.combinations[i];
        let ri = spec.dims.range(i);
        // Σ_{j<l} w_j K(x_i, x_j) a_j
        let mut coupled = DVector::zeros(ri.len());
        for (j, &w) in weights.iter().enumerate() {
            let rj = spec.dims.range(j);
            let kij = k.view((ri.start, rj.start), (ri.len(), rj.len()));
            coupled += kij * a.as_vector().rows(rj.start, rj.len()) * w;
        }
        let term = ci.transpose() * (ci * coupled - &spec.labels[i]) * scale;
        let mut hi = h.rows_mut(ri.start, ri.len());
        hi += term;
    }
    Ok(h)
}

/// The matrix `R` with `∇_a H = I + R/γ_A`.
pub fn coupling_matrix(
    spec: &ProblemSpec,
    a: &CoefficientVector,
    variant: ResidualVariant,
) -> Result<DMatrix<f64>> {
    spec.check_len(a)?;
    residual_supported(spec)?;
    let n = spec.n();
    let l = spec.l() as f64;
    let k = spec.gram.data();
    let mut r = if spec.uses_regularizer() {
        &spec.mk * spec.gamma_i
    } else {
        DMatrix::zeros(n, n)
    };
    let f = spec.sample(a);
    let paper_els =
        variant == ResidualVariant::PaperFaithful && spec.loss == LossKind::ExponentialLeastSquares;
    if !paper_els {
        // (1/(2l)) D K on labeled rows; for least squares D = 2 CᵀC
        let d = loss_curvature(spec, &f)?;
        r += d * k / (2.0 * l);
        return Ok(r);
    }
    let labeled = spec.l();
    let residuals: Vec<DVector<f64>> = spec
        .labels
        .iter()
        .enumerate()
        .map(|(j, y)| y - spec.prediction(&f, j))
        .collect();
    let weights: Vec<f64> = residuals
        .iter()
        .map(|res| (-res.norm_squared()).exp())
        .collect();
    // ρ_j = ∇_a w_j = 2 w_j (C_j K_{j,·})ᵀ (y_j - C_j f_j), stored as rows
    let rho: Vec<DVector<f64>> = (0..labeled)
        .map(|j| {
            let rj = spec.dims.range(j);
            let kj = k.rows(rj.start, rj.len());
            (&spec.combinations[j] * kj).transpose() * &residuals[j] * (2.0 * weights[j])
        })
        .collect();
    for i in 0..labeled {
        let ci = &spec.combinations[i];
        let ctc = ci.transpose() * ci;
        let ri = spec.dims.range(i);
        let mut rows = DMatrix::zeros(ri.len(), n);
        for j in 0..labeled {
            let rj = spec.dims.range(j);
            let kij = k
                .view((ri.start, rj.start), (ri.len(), rj.len()))
                .into_owned();
            // weight held fixed: w_j C_iᵀC_i K_ij on the a_j columns
            let direct = &ctc * &kij * weights[j];
            let mut cols = rows.columns_mut(rj.start, rj.len());
            cols += direct;
            // weight differentiated: (C_iᵀC_i K_ij a_j) ρ_jᵀ
            let v = &ctc * kij * a.as_vector().rows(rj.start, rj.len());
            rows += v * rho[j].transpose();
        }
        let mut target = r.rows_mut(ri.start, ri.len());
        target += rows / l;
    }
    Ok(r)
}

/// Jacobian `∇_a H = I + R/γ_A`.
pub fn jacobian_h(
    spec: &ProblemSpec,
    a: &CoefficientVector,
    variant: ResidualVariant,
) -> Result<DMatrix<f64>> {
    let r = coupling_matrix(spec, a, variant)?;
    let n = r.nrows();
    Ok(DMatrix::identity(n, n) + r / spec.gamma_a)
}

/// Extended Gram over the problem points followed by `extra` points.
fn extended_gram(spec: &ProblemSpec, extra: &[(InputPoint, usize)]) -> Result<BlockGram> {
    let mut points = spec.points.clone();
    points.extend(extra.iter().map(|(p, _)| p.clone()));
    let extra_d: Vec<usize> = extra.iter().map(|&(_, d)| d).collect();
    let layout = spec.dims.extended(&extra_d)?;
    assemble_gram(&points, &layout, &spec.kernel)
}

fn check_extended(spec: &ProblemSpec, ext: &BlockGram, b: &DVector<f64>) -> Result<()> {
    if b.len() != ext.dim() {
        return Err(Error::Dimension(format!(
            "extended coefficients have length {}, extended layout has {}",
            b.len(),
            ext.dim()
        )));
    }
    let check = check_psd(ext.data(), PSD_TOL)?;
    if !check.is_psd {
        return Err(Error::NotPsd {
            min_eig: check.min_eig,
            max_eig: check.max_eig,
        });
    }
    debug_assert!(ext.dim() >= spec.n());
    Ok(())
}

/// `I` for the section `Σ_z K(·, z) b_z` supported on the problem points and
/// `extra` points.
pub fn extended_functional(
    spec: &ProblemSpec,
    extra: &[(InputPoint, usize)],
    b: &DVector<f64>,
) -> Result<f64> {
    let ext = extended_gram(spec, extra)?;
    check_extended(spec, &ext, b)?;
    let kb = ext.data() * b;
    let f = kb.rows(0, spec.n()).into_owned();
    functional_from_values(spec, &f, b.dot(&kb))
}

/// Coefficients of the orthogonal projection of `Σ_z K(·, z) b_z` onto the
/// span of the kernel sections at the problem points.
pub fn project_onto_span(
    spec: &ProblemSpec,
    extra: &[(InputPoint, usize)],
    b: &DVector<f64>,
) -> Result<CoefficientVector> {
    let ext = extended_gram(spec, extra)?;
    check_extended(spec, &ext, b)?;
    let n = spec.n();
    let rhs = ext.data().rows(0, n) * b;
    let k = spec.gram.data();
    let check = check_psd(k, PSD_TOL)?;
    let well_posed = check.min_eig > 1e-10 * check.max_eig.max(0.0);
    let c = match (well_posed, Cholesky::new(k.clone())) {
        (true, Some(chol)) => chol.solve(&rhs),
        _ => psd_pseudo_solve(k, &rhs, 1e-10),
    };
    Ok(CoefficientVector::new(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularizer::RegularizerOperator;

    fn single_point(loss: LossKind, y: f64, gamma_a: f64) -> ProblemSpec {
        let dims = SpaceDims::square(vec![1]).unwrap();
        ProblemSpec::new(ProblemInputs {
            points: vec![InputPoint::new(vec![0.0, 0.0])],
            labels: vec![DVector::from_element(1, y)],
            dims: dims.clone(),
            combinations: None,
            regularizer: RegularizerOperator::zero(dims),
            gamma_a,
            gamma_i: 0.0,
            kernel: KernelConfig::scalar_gaussian(1.0),
            loss,
        })
        .unwrap()
    }

    #[test]
    fn els_at_origin() {
        let spec = single_point(LossKind::ExponentialLeastSquares, 1.3, 0.5);
        let v = learning_functional(&spec, &CoefficientVector::zeros(1)).unwrap();
        assert!((v - (1.0 - (-1.69f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn ls_at_origin() {
        let spec = single_point(LossKind::LeastSquares, -2.0, 3.0);
        let v = learning_functional(&spec, &CoefficientVector::zeros(1)).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn ls_one_variable_stationary_point() {
        // (1/l)·2(a - y) + 2γ_A a = 0  ⇒  a = y/(1+γ_A)
        let (y, ga) = (1.7, 0.4);
        let spec = single_point(LossKind::LeastSquares, y, ga);
        let a = CoefficientVector::from_slice(&[y / (1.0 + ga)]);
        let g = gradient_i(&spec, &a).unwrap();
        assert!(g[0].abs() < 1e-15);
        for v in [
            ResidualVariant::PaperFaithful,
            ResidualVariant::GradientConsistent,
        ] {
            assert!(residual_h(&spec, &a, v).unwrap()[0].abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_a_must_be_positive() {
        let dims = SpaceDims::square(vec![1]).unwrap();
        let err = ProblemSpec::new(ProblemInputs {
            points: vec![InputPoint::new(vec![0.0])],
            labels: vec![DVector::from_element(1, 1.0)],
            dims: dims.clone(),
            combinations: None,
            regularizer: RegularizerOperator::zero(dims),
            gamma_a: 0.0,
            gamma_i: 0.0,
            kernel: KernelConfig::scalar_gaussian(1.0),
            loss: LossKind::LeastSquares,
        })
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn hinge_has_value_but_no_gradient() {
        let spec = single_point(LossKind::Hinge, 1.0, 1.0);
        let a = CoefficientVector::from_slice(&[0.5]);
        assert_eq!(learning_functional(&spec, &a).unwrap(), 0.5 + 0.25);
        assert!(gradient_i(&spec, &a).is_err());
        assert!(residual_h(&spec, &a, ResidualVariant::PaperFaithful).is_err());
    }

    #[test]
    fn sigmoid_has_no_residual_map() {
        let spec = single_point(LossKind::Sigmoid, 1.0, 1.0);
        let a = CoefficientVector::from_slice(&[0.5]);
        assert!(gradient_i(&spec, &a).is_ok());
        assert!(matches!(
            jacobian_h(&spec, &a, ResidualVariant::GradientConsistent),
            Err(Error::UnsupportedLoss { .. })
        ));
    }

    #[test]
    fn projection_without_extra_points_is_identity() {
        let dims = SpaceDims::square(vec![1, 1]).unwrap();
        let spec = ProblemSpec::new(ProblemInputs {
            points: vec![InputPoint::new(vec![0.0]), InputPoint::new(vec![0.7])],
            labels: vec![DVector::from_element(1, 1.0)],
            dims: dims.clone(),
            combinations: None,
            regularizer: RegularizerOperator::zero(dims),
            gamma_a: 1.0,
            gamma_i: 0.0,
            kernel: KernelConfig::scalar_gaussian(1.0),
            loss: LossKind::LeastSquares,
        })
        .unwrap();
        let b = DVector::from_vec(vec![0.3, -1.2]);
        let c = project_onto_span(&spec, &[], &b).unwrap();
        assert!((c.as_vector() - &b).amax() < 1e-12);
        let zero = project_onto_span(
            &spec,
            &[(InputPoint::new(vec![3.0]), 1)],
            &DVector::zeros(3),
        )
        .unwrap();
        assert_eq!(zero.as_vector(), &DVector::zeros(2));
    }
}
