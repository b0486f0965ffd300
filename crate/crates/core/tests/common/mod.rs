//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use opkernel::{
    gaussian_weights, graph_laplacian, within_view_embed, CoefficientVector, InputPoint,
    KernelConfig, LossKind, ProblemInputs, ProblemSpec, RegularizerOperator, SpaceDims,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOY_COORDS: [[f64; 2]; 6] = [
    [0.5377, 0.3978],
    [0.6342, -0.4584],
    [0.3273, 0.3923],
    [0.3472, 0.4305],
    [0.6724, -0.7962],
    [0.8174, -0.3601],
];
pub const TOY_REGIONS: [u8; 6] = [1, 2, 1, 1, 2, 2];
pub const TOY_DIMS: [usize; 6] = [1, 2, 1, 1, 2, 2];
pub const TOY_Y1: f64 = 1.2108;
pub const TOY_Y2: [f64; 2] = [1.6636, 4.3843];
pub const TOY_GAMMA_A: f64 = 0.25;
pub const TOY_GAMMA_I: f64 = 10.0;
pub const TOY_SIGMA: f64 = 0.1;
pub const TOY_ALPHA: f64 = 10.0;
/// Published optimum of the toy problem, four decimals.
pub const A_PAPER: [f64; 9] = [
    0.8433, 1.7226, 1.5475, 0.4395, 0.3944, 0.1926, -0.0055, 1.4116, -0.1589,
];

pub fn toy_points() -> Vec<InputPoint> {
    TOY_COORDS
        .iter()
        .zip(TOY_REGIONS)
        .map(|(c, r)| InputPoint::in_region(c.to_vec(), r))
        .collect()
}

pub fn toy_dims() -> SpaceDims {
    SpaceDims::square(TOY_DIMS.to_vec()).unwrap()
}

pub fn toy_spec() -> ProblemSpec {
    let points = toy_points();
    let dims = toy_dims();
    let w = gaussian_weights(&points, TOY_SIGMA, None).unwrap();
    let m = within_view_embed(&graph_laplacian(&w, false).unwrap(), &dims).unwrap();
    ProblemSpec::new(ProblemInputs {
        points,
        labels: vec![
            DVector::from_vec(vec![TOY_Y1]),
            DVector::from_vec(TOY_Y2.to_vec()),
        ],
        dims,
        combinations: None,
        regularizer: m,
        gamma_a: TOY_GAMMA_A,
        gamma_i: TOY_GAMMA_I,
        kernel: KernelConfig::toy(TOY_SIGMA, TOY_ALPHA),
        loss: LossKind::ExponentialLeastSquares,
    })
    .unwrap()
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

/// Points in the unit square with pairwise distance at least `min_sep`.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, min_sep: f64) -> Vec<InputPoint> {
    let mut out: Vec<InputPoint> = Vec::with_capacity(n);
    while out.len() < n {
        let p = InputPoint::new(vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]);
        if out.iter().all(|q| q.dist(&p) >= min_sep) {
            out.push(p);
        }
    }
    out
}

/// Random problem with `l ≤ 4` labeled and `u ≤ 6` unlabeled points, mixed
/// coefficient dimensions in {1, 2}, random combination operators and a
/// scalar Gaussian kernel.
pub fn random_spec(rng: &mut ChaCha8Rng, loss: LossKind) -> ProblemSpec {
    let l = rng.random_range(1..=4);
    let u = rng.random_range(0..=6);
    let n = l + u;
    let points = random_points(rng, n, 0.2);
    let d: Vec<usize> = (0..n).map(|_| rng.random_range(1..=2)).collect();
    let mut e = Vec::with_capacity(n);
    let mut combos = Vec::with_capacity(n);
    for &di in &d {
        let ei = if loss == LossKind::Sigmoid {
            1
        } else {
            rng.random_range(1..=di)
        };
        let c = if ei == di && rng.random_bool(0.5) {
            DMatrix::identity(di, di)
        } else {
            DMatrix::from_fn(ei, di, |_, _| rng.random_range(-1.0..1.0))
        };
        e.push(ei);
        combos.push(c);
    }
    let labels: Vec<DVector<f64>> = (0..l)
        .map(|j| match loss {
            LossKind::Sigmoid => {
                DVector::from_element(1, if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            }
            _ => random_vector(rng, e[j], 2.0),
        })
        .collect();
    let dims = SpaceDims::new(d, e).unwrap();
    let gamma_i = if rng.random_bool(0.3) {
        0.0
    } else {
        rng.random_range(0.05..1.0)
    };
    let regularizer = if gamma_i > 0.0 {
        let w = gaussian_weights(&points, 0.5, None).unwrap();
        let lap = graph_laplacian(&w, rng.random_bool(0.5)).unwrap();
        within_view_embed(&lap, &dims).unwrap()
    } else {
        RegularizerOperator::zero(dims.clone())
    };
    ProblemSpec::new(ProblemInputs {
        points,
        labels,
        dims,
        combinations: Some(combos),
        regularizer,
        gamma_a: rng.random_range(0.1..1.0),
        gamma_i,
        kernel: KernelConfig::scalar_gaussian(0.5),
        loss,
    })
    .unwrap()
}

/// Gram matrix of the scalar Gaussian kernel, built entry by entry.
pub fn brute_scalar_gram(points: &[InputPoint], dims: &SpaceDims, sigma: f64) -> DMatrix<f64> {
    let n = dims.total();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..points.len() {
        for j in 0..points.len() {
            let dsq: f64 = points[i]
                .coords
                .iter()
                .zip(&points[j].coords)
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            let g = (-dsq / (sigma * sigma)).exp();
            for r in 0..dims.d(i).min(dims.d(j)) {
                k[(dims.offset(i) + r, dims.offset(j) + r)] = g;
            }
        }
    }
    k
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn central_gradient(
    f: impl Fn(&DVector<f64>) -> f64,
    a: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    DVector::from_fn(a.len(), |i, _| {
        let mut p = a.clone();
        let mut m = a.clone();
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    })
}

pub fn central_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    a: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = a.clone();
        let mut m = a.clone();
        p[i] += h;
        m[i] -= h;
        cols.push((f(&p) - f(&m)) / (2.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// `max|x - reference| / max|reference|`.
pub fn rel_err(x: &[f64], reference: &[f64]) -> f64 {
    let diff = x
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = reference.iter().map(|b| b.abs()).fold(0.0, f64::max);
    diff / scale.max(f64::MIN_POSITIVE)
}

pub fn functional_of(spec: &ProblemSpec) -> impl Fn(&DVector<f64>) -> f64 + '_ {
    move |a| opkernel::learning_functional(spec, &CoefficientVector::new(a.clone())).unwrap()
}

/// Minimizer of the least-squares functional from its normal equations,
/// assembled from an entrywise Gram matrix.
pub fn ls_quadratic_oracle(spec: &ProblemSpec, sigma: f64) -> DVector<f64> {
    let dims = spec.dims();
    let n = dims.total();
    let k = brute_scalar_gram(spec.points(), dims, sigma);
    let l = spec.l();
    let rows: usize = (0..l).map(|j| dims.e(j)).sum();
    // stacked C_j on labeled blocks
    let mut p = DMatrix::zeros(rows, n);
    let mut y = DVector::zeros(rows);
    let mut r0 = 0;
    for j in 0..l {
        let c = spec.combination(j);
        p.view_mut((r0, dims.offset(j)), c.shape()).copy_from(c);
        y.rows_mut(r0, dims.e(j)).copy_from(&spec.labels()[j]);
        r0 += dims.e(j);
    }
    let pk = &p * &k;
    let m = spec.regularizer().matrix();
    let q = pk.transpose() * &pk / l as f64 + &k * spec.gamma_a() + &k * m * &k * spec.gamma_i();
    let b = pk.transpose() * y / l as f64;
    q.lu().solve(&b).expect("nonsingular normal equations")
}
