//! Block operator-valued kernels over per-point output spaces.
//!
//! Every input point `x_i` carries its own coefficient space `ℝ^{d_i}`. A
//! kernel evaluation `K(x_i, x_j)` is a `d_i × d_j` block, and the Gram
//! matrix is the `(l+u) × (l+u)` block matrix of those evaluations,
//! flattened to a dense `N × N` matrix with `N = Σ d_i`. Block `i` occupies
//! rows `offsets[i]..offsets[i] + d_i`, and every other module uses the same
//! layout for coefficient vectors and regularization operators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_symmetric, sorted_eigen};

/// A point of the input space, optionally tagged with the region it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPoint {
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<u8>,
}

impl InputPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self {
            coords,
            region: None,
        }
    }

    pub fn in_region(coords: Vec<f64>, region: u8) -> Self {
        Self {
            coords,
            region: Some(region),
        }
    }

    pub fn dist_sq(&self, other: &InputPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &InputPoint) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Coefficient-space dimension `d_i` and label dimension `e_i` of every point,
/// with block offsets into the flattened layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceDims {
    d: Vec<usize>,
    e: Vec<usize>,
    offsets: Vec<usize>,
}

impl SpaceDims {
    pub fn new(d: Vec<usize>, e: Vec<usize>) -> Result<Self> {
        if d.len() != e.len() {
            return Err(Error::Dimension(format!(
                "{} coefficient dimensions but {} label dimensions",
                d.len(),
                e.len()
            )));
        }
        if let Some(i) = d.iter().chain(&e).position(|&k| k == 0) {
            return Err(Error::Dimension(format!(
                "dimension entry {} is zero",
                i % d.len().max(1)
            )));
        }
        let mut offsets = Vec::with_capacity(d.len() + 1);
        offsets.push(0);
        for &di in &d {
            offsets.push(offsets.last().unwrap() + di);
        }
        Ok(Self { d, e, offsets })
    }

    /// Label spaces equal to the coefficient spaces (`C_i = I`).
    pub fn square(d: Vec<usize>) -> Result<Self> {
        let e = d.clone();
        Self::new(d, e)
    }

    pub fn n_points(&self) -> usize {
        self.d.len()
    }

    /// Total flattened dimension `N`.
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn d(&self, i: usize) -> usize {
        self.d[i]
    }

    pub fn e(&self, i: usize) -> usize {
        self.e[i]
    }

    pub fn ds(&self) -> &[usize] {
        &self.d
    }

    pub fn es(&self) -> &[usize] {
        &self.e
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.d.windows(2).all(|w| w[0] == w[1])
    }

    /// Layout obtained by appending further points.
    pub fn extended(&self, extra_d: &[usize]) -> Result<Self> {
        let mut d = self.d.clone();
        let mut e = self.e.clone();
        d.extend_from_slice(extra_d);
        e.extend_from_slice(extra_d);
        Self::new(d, e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `exp(-‖x-y‖²/σ²)` on a rectangular identity pattern.
    ScalarGaussian,
    /// The two-region kernel: Gaussian on the first components, plus
    /// `exp(-α‖x-y‖)` on the second component between region-2 points.
    ToyBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub sigma: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

impl KernelConfig {
    pub fn scalar_gaussian(sigma: f64) -> Self {
        Self {
            kind: KernelKind::ScalarGaussian,
            sigma,
            alpha: 1.0,
        }
    }

    pub fn toy(sigma: f64, alpha: f64) -> Self {
        Self {
            kind: KernelKind::ToyBlock,
            sigma,
            alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Output dimension a toy-block region requires.
pub fn toy_region_dim(region: u8) -> Option<usize> {
    match region {
        1 => Some(1),
        2 => Some(2),
        _ => None,
    }
}

fn check_toy_point(x: &InputPoint, d: usize, index: usize, other: usize) -> Result<()> {
    let region = x.region.ok_or_else(|| Error::PointPair {
        first: index,
        second: other,
        reason: "toy-block kernel needs a region tag on every point".into(),
    })?;
    match toy_region_dim(region) {
        Some(expected) if expected == d => Ok(()),
        Some(expected) => Err(Error::PointPair {
            first: index,
            second: other,
            reason: format!("point in region {region} must have dimension {expected}, got {d}"),
        }),
        None => Err(Error::PointPair {
            first: index,
            second: other,
            reason: format!("unknown toy region {region}"),
        }),
    }
}

fn block_for(
    cfg: &KernelConfig,
    xi: &InputPoint,
    di: usize,
    xj: &InputPoint,
    dj: usize,
    (i, j): (usize, usize),
) -> Result<DMatrix<f64>> {
    if xi.coords.len() != xj.coords.len() {
        return Err(Error::PointPair {
            first: i,
            second: j,
            reason: format!(
                "ambient dimensions differ ({} vs {})",
                xi.coords.len(),
                xj.coords.len()
            ),
        });
    }
    let dsq = xi.dist_sq(xj);
    let g = (-dsq / (cfg.sigma * cfg.sigma)).exp();
    let mut block = DMatrix::zeros(di, dj);
    match cfg.kind {
        KernelKind::ScalarGaussian => {
            for r in 0..di.min(dj) {
                block[(r, r)] = g;
            }
        }
        KernelKind::ToyBlock => {
            check_toy_point(xi, di, i, j)?;
            check_toy_point(xj, dj, j, i)?;
            block[(0, 0)] = g;
            if di == 2 && dj == 2 {
                block[(1, 1)] = (-cfg.alpha * dsq.sqrt()).exp();
            }
        }
    }
    Ok(block)
}

/// Evaluates `K(xi, xj)` as a `di × dj` block.
pub fn kernel_block(
    cfg: &KernelConfig,
    xi: &InputPoint,
    di: usize,
    xj: &InputPoint,
    dj: usize,
) -> Result<DMatrix<f64>> {
    block_for(cfg, xi, di, xj, dj, (0, 1))
}

/// Dense block Gram matrix together with its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGram {
    data: DMatrix<f64>,
    layout: SpaceDims,
}

impl BlockGram {
    /// Wraps an explicit matrix. Fails unless it is square, matches the
    /// layout and is symmetric.
    pub fn from_matrix(data: DMatrix<f64>, layout: SpaceDims) -> Result<Self> {
        if data.nrows() != layout.total() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, layout needs {}",
                data.nrows(),
                layout.total()
            )));
        }
        ensure_symmetric(&data)?;
        Ok(Self { data, layout })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn layout(&self) -> &SpaceDims {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// The `(i, j)` block `K(x_i, x_j)`.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let (ri, rj) = (self.layout.range(i), self.layout.range(j));
        self.data
            .view((ri.start, rj.start), (ri.len(), rj.len()))
            .into_owned()
    }
}

/// Assembles the block Gram matrix over `points`.
///
/// Upper-triangular blocks are evaluated and mirrored, so the result is
/// exactly symmetric.
pub fn assemble_gram(
    points: &[InputPoint],
    dims: &SpaceDims,
    cfg: &KernelConfig,
) -> Result<BlockGram> {
    cfg.validate()?;
    if points.len() != dims.n_points() {
        return Err(Error::Dimension(format!(
            "{} points but layout has {} blocks",
            points.len(),
            dims.n_points()
        )));
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].coords == points[j].coords {
                return Err(Error::DuplicatePoints {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let n = dims.total();
    let mut data = DMatrix::zeros(n, n);
    for i in 0..points.len() {
        for j in i..points.len() {
            let block = block_for(cfg, &points[i], dims.d(i), &points[j], dims.d(j), (i, j))?;
            let (oi, oj) = (dims.offset(i), dims.offset(j));
            for r in 0..dims.d(i) {
                for c in 0..dims.d(j) {
                    data[(oi + r, oj + c)] = block[(r, c)];
                    data[(oj + c, oi + r)] = block[(r, c)];
                }
            }
        }
    }
    Ok(BlockGram {
        data,
        layout: dims.clone(),
    })
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub min_eig: f64,
    pub max_eig: f64,
    pub is_psd: bool,
}

/// Default PSD tolerance, relative to the largest eigenvalue.
pub const PSD_TOL: f64 = 1e-10;

/// Smallest eigenvalue of `m` and whether it clears `-tol·max(1, λ_max)`.
pub fn check_psd(m: &DMatrix<f64>, tol: f64) -> Result<PsdCheck> {
    ensure_symmetric(m)?;
    if m.nrows() == 0 {
        return Ok(PsdCheck {
            min_eig: 0.0,
            max_eig: 0.0,
            is_psd: true,
        });
    }
    let eig = sorted_eigen(m);
    let min_eig = eig.values[0];
    let max_eig = eig.values[eig.values.len() - 1];
    Ok(PsdCheck {
        min_eig,
        max_eig,
        is_psd: min_eig >= -tol * max_eig.max(1.0),
    })
}

/// Finite-dimensional Kolmogorov decomposition `Gram = VᵀV` with `V` of
/// minimal row count.
#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovFactor {
    v: DMatrix<f64>,
}

impl KolmogorovFactor {
    /// `r × N` factor.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.v.nrows()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.v.transpose() * &self.v
    }

    /// Column block `V(x_i)` mapping `ℝ^{d_i}` into the feature space.
    pub fn feature_map(&self, layout: &SpaceDims, i: usize) -> DMatrix<f64> {
        let r = layout.range(i);
        self.v.columns(r.start, r.len()).into_owned()
    }
}

/// Factors a PSD Gram matrix through its eigendecomposition, keeping only
/// eigenvalues above `tol·λ_max`.
pub fn kolmogorov_factor(g: &BlockGram, tol: f64) -> Result<KolmogorovFactor> {
    factor_psd(g.data(), tol)
}

pub(crate) fn factor_psd(m: &DMatrix<f64>, tol: f64) -> Result<KolmogorovFactor> {
    let check = check_psd(m, tol)?;
    if !check.is_psd {
        return Err(Error::NotPsd {
            min_eig: check.min_eig,
            max_eig: check.max_eig,
        });
    }
    let n = m.nrows();
    let eig = sorted_eigen(m);
    let cutoff = tol * check.max_eig.max(0.0);
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff).collect();
    let mut v = DMatrix::zeros(kept.len(), n);
    // largest eigenvalues first
    for (row, &k) in kept.iter().rev().enumerate() {
        let s = eig.values[k].sqrt();
        for c in 0..n {
            v[(row, c)] = s * eig.vectors[(c, k)];
        }
    }
    Ok(KolmogorovFactor { v })
}

/// Representer coefficients `a = (a_1, …, a_{l+u})`, `a_i ∈ ℝ^{d_i}`, stored
/// flat in block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(DVector<f64>);

impl CoefficientVector {
    pub fn new(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self(DVector::from_column_slice(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn block(&self, dims: &SpaceDims, i: usize) -> DVector<f64> {
        let r = dims.range(i);
        self.0.rows(r.start, r.len()).into_owned()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }
}

impl From<DVector<f64>> for CoefficientVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

/// Value at `x` of the section `f = Σ_j K(·, x_j) a_j`, as a vector in `ℝ^{dx}`.
pub fn evaluate_section(
    a: &CoefficientVector,
    points: &[InputPoint],
    dims: &SpaceDims,
    cfg: &KernelConfig,
    x: &InputPoint,
    dx: usize,
) -> Result<DVector<f64>> {
    if a.len() != dims.total() || points.len() != dims.n_points() {
        return Err(Error::Dimension(format!(
            "coefficients of length {} with {} points over a layout of {} blocks / {} entries",
            a.len(),
            points.len(),
            dims.n_points(),
            dims.total()
        )));
    }
    let mut out = DVector::zeros(dx);
    for (j, xj) in points.iter().enumerate() {
        let block = block_for(cfg, x, dx, xj, dims.d(j), (usize::MAX, j))?;
        out += block * a.block(dims, j);
    }
    Ok(out)
}

/// `aᵀ K a`, the squared RKHS norm of the representer-form section.
pub fn rkhs_norm_sq(a: &CoefficientVector, g: &BlockGram) -> Result<f64> {
    if a.len() != g.dim() {
        return Err(Error::Dimension(format!(
            "coefficients of length {} against a {}x{} Gram matrix",
            a.len(),
            g.dim(),
            g.dim()
        )));
    }
    Ok(a.as_vector().dot(&(g.data() * a.as_vector())))
}
