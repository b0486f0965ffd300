//! Graph weights, Laplacians and the manifold regularization operator `M`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{check_psd, InputPoint, SpaceDims, PSD_TOL};
use crate::linalg::kron;

/// Symmetric nonnegative adjacency weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphWeights {
    w: DMatrix<f64>,
}

impl GraphWeights {
    pub fn from_matrix(w: DMatrix<f64>) -> Result<Self> {
        crate::linalg::ensure_symmetric(&w)?;
        if w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "graph weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    l: DMatrix<f64>,
    normalized: bool,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }
}

/// Symmetric PSD operator on the flattened coefficient layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerOperator {
    m: DMatrix<f64>,
    layout: SpaceDims,
}

impl RegularizerOperator {
    /// Wraps a matrix after checking size, symmetry and positive semidefiniteness.
    pub fn new(m: DMatrix<f64>, layout: SpaceDims) -> Result<Self> {
        if m.nrows() != layout.total() || m.ncols() != layout.total() {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, layout needs {}",
                m.nrows(),
                m.ncols(),
                layout.total()
            )));
        }
        let check = check_psd(&m, PSD_TOL)?;
        if !check.is_psd {
            return Err(Error::NotPsd {
                min_eig: check.min_eig,
                max_eig: check.max_eig,
            });
        }
        Ok(Self { m, layout })
    }

    pub fn zero(layout: SpaceDims) -> Self {
        let n = layout.total();
        Self {
            m: DMatrix::zeros(n, n),
            layout,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn layout(&self) -> &SpaceDims {
        &self.layout
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&x| x == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizerConfig {
    pub gamma_i: f64,
    pub gamma_b: f64,
    pub gamma_w: f64,
    pub sigma_graph: f64,
    pub epsilon_neighbor: Option<f64>,
    pub normalized: bool,
}

/// Gaussian weights `exp(-‖x_j - x_k‖²/(2σ²))`, zeroed beyond `epsilon_neighbor`
/// when one is given.
pub fn gaussian_weights(
    points: &[InputPoint],
    sigma_graph: f64,
    epsilon_neighbor: Option<f64>,
) -> Result<GraphWeights> {
    if !(sigma_graph > 0.0 && sigma_graph.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "graph sigma must be positive, got {sigma_graph}"
        )));
    }
    if let Some(eps) = epsilon_neighbor {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "neighborhood radius must be positive, got {eps}"
            )));
        }
    }
    let n = points.len();
    let two_s2 = 2.0 * sigma_graph * sigma_graph;
    let mut w = DMatrix::zeros(n, n);
    for j in 0..n {
        w[(j, j)] = 1.0;
        for k in (j + 1)..n {
            let dsq = points[j].dist_sq(&points[k]);
            let near = epsilon_neighbor.is_none_or(|eps| dsq.sqrt() <= eps);
            let v = if near { (-dsq / two_s2).exp() } else { 0.0 };
            w[(j, k)] = v;
            w[(k, j)] = v;
        }
    }
    Ok(GraphWeights { w })
}

/// `L = V - W`, or `V^{-1/2} L V^{-1/2}` when `normalized`.
pub fn graph_laplacian(w: &GraphWeights, normalized: bool) -> Result<LaplacianMatrix> {
    let w = w.matrix();
    let n = w.nrows();
    let degrees: Vec<f64> = (0..n).map(|j| w.row(j).sum()).collect();
    if let Some(j) = degrees.iter().position(|&v| v <= 0.0) {
        return Err(Error::IsolatedVertex(j));
    }
    let mut l = -w.clone();
    for j in 0..n {
        l[(j, j)] += degrees[j];
    }
    if normalized {
        let inv_sqrt: Vec<f64> = degrees.iter().map(|v| 1.0 / v.sqrt()).collect();
        for j in 0..n {
            for k in 0..n {
                l[(j, k)] *= inv_sqrt[j] * inv_sqrt[k];
            }
        }
    }
    // both branches are symmetric up to rounding in the scaling; mirror to make it exact
    for j in 0..n {
        for k in (j + 1)..n {
            l[(k, j)] = l[(j, k)];
        }
    }
    Ok(LaplacianMatrix { l, normalized })
}

/// `M_B = I_n ⊗ (M_m ⊗ I_{dimY})` with `M_m = m·I - 𝟙𝟙ᵀ`.
pub fn between_view_operator(m: usize, dim_y: usize, n: usize) -> Result<RegularizerOperator> {
    if m == 0 || dim_y == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "between-view operator needs m, dimY, n ≥ 1 (got {m}, {dim_y}, {n})"
        )));
    }
    let mut mm = DMatrix::from_element(m, m, -1.0);
    for k in 0..m {
        mm[(k, k)] = (m - 1) as f64;
    }
    let per_point = kron(&mm, &DMatrix::identity(dim_y, dim_y));
    let full = kron(&DMatrix::identity(n, n), &per_point);
    let layout = SpaceDims::square(vec![m * dim_y; n])?;
    Ok(RegularizerOperator { m: full, layout })
}

/// Between-view operator over an existing layout, which must be homogeneous
/// with every block split into `views` equal parts.
pub fn between_view_for_layout(views: usize, layout: &SpaceDims) -> Result<RegularizerOperator> {
    if !layout.is_homogeneous() {
        return Err(Error::Dimension(
            "between-view regularization needs the same coefficient space at every point".into(),
        ));
    }
    let d = layout.d(0);
    if views == 0 || !d.is_multiple_of(views) {
        return Err(Error::Dimension(format!(
            "coefficient dimension {d} is not divisible into {views} views"
        )));
    }
    let mut op = between_view_operator(views, d / views, layout.n_points())?;
    op.layout = layout.clone();
    Ok(op)
}

/// Embeds a point Laplacian into the coefficient layout.
///
/// The first component of every block couples through `L`; each further
/// component of block `i` only carries `l_ii` on its own diagonal entry. On a
/// homogeneous layout with a single component this is `L` itself; on a
/// homogeneous layout with `d > 1` it is `L ⊗ I_d`.
pub fn within_view_embed(l: &LaplacianMatrix, dims: &SpaceDims) -> Result<RegularizerOperator> {
    let lm = l.matrix();
    if lm.nrows() != dims.n_points() {
        return Err(Error::Dimension(format!(
            "Laplacian has {} vertices, layout has {} points",
            lm.nrows(),
            dims.n_points()
        )));
    }
    if dims.is_homogeneous() {
        let d = dims.d(0);
        return Ok(RegularizerOperator {
            m: kron(lm, &DMatrix::identity(d, d)),
            layout: dims.clone(),
        });
    }
    let n = dims.total();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..dims.n_points() {
        for k in 0..dims.n_points() {
            m[(dims.offset(i), dims.offset(k))] = lm[(i, k)];
        }
        for c in 1..dims.d(i) {
            let r = dims.offset(i) + c;
            m[(r, r)] = lm[(i, i)];
        }
    }
    Ok(RegularizerOperator {
        m,
        layout: dims.clone(),
    })
}

/// `M = (γ_B·M_B + γ_W·M_W)/γ_I`, so that `γ_I·M` is the combined penalty.
/// With `γ_I = 0` the operator is zero.
pub fn combine_regularizer(
    cfg: &RegularizerConfig,
    between: Option<&RegularizerOperator>,
    within: Option<&RegularizerOperator>,
) -> Result<RegularizerOperator> {
    let layout = match (between, within) {
        (Some(b), Some(w)) => {
            if b.layout != w.layout {
                return Err(Error::Dimension(
                    "between-view and within-view operators use different layouts".into(),
                ));
            }
            b.layout.clone()
        }
        (Some(b), None) => b.layout.clone(),
        (None, Some(w)) => w.layout.clone(),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "at least one of the between-view and within-view operators is required".into(),
            ))
        }
    };
    for (name, g) in [
        ("gamma_i", cfg.gamma_i),
        ("gamma_b", cfg.gamma_b),
        ("gamma_w", cfg.gamma_w),
    ] {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and nonnegative, got {g}"
            )));
        }
    }
    if cfg.gamma_i == 0.0 {
        return Ok(RegularizerOperator::zero(layout));
    }
    let n = layout.total();
    let mut m = DMatrix::zeros(n, n);
    if let Some(b) = between {
        m += b.matrix() * cfg.gamma_b;
    }
    if let Some(w) = within {
        m += w.matrix() * cfg.gamma_w;
    }
    m /= cfg.gamma_i;
    RegularizerOperator::new(m, layout)
}
