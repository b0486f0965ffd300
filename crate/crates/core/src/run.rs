//! Running a configured problem and writing its artifacts.
//!
//! A run produces three kinds of files in the output directory:
//!
//! - a TOML report with the selected coefficients, the objective and residual
//!   norms, the search-cube data, the seed, and one `[[start]]` table per
//!   local solve;
//! - a trace CSV with columns `start_index,iter,objective,grad_inf`;
//! - one mesh CSV per mesh request, named `mesh_region{r}_component{c}.csv`,
//!   with columns `coord1,coord2,value`.
//!
//! Every floating-point number is written with 17 significant digits, so a
//! report can be read back bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, LoadedConfig, MeshRequest};
use crate::kernel::{
    check_psd, evaluate_section, CoefficientVector, InputPoint, PsdCheck, PSD_TOL,
};
use crate::linalg::inf_norm;
use crate::objective::{learning_functional, residual_h, ResidualVariant};
use crate::regularizer::{gaussian_weights, graph_laplacian};
use crate::solver::{
    delta_bound, functional_grad_inf, multistart_solve, solve_ls, DeltaBound, SolveMode,
    SolveReport, StartRecord, TracePoint,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[source] crate::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Report { path: PathBuf, message: String },
}

impl RunError {
    /// Process exit status: 2 for invalid input, 3 for solver failures and
    /// 1 for I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(ConfigError::Io { .. }) | RunError::Io { .. } => 1,
            RunError::Config(_) | RunError::Report { .. } => 2,
            RunError::Solver(_) => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Formats a float with 17 significant digits in TOML-compatible spelling.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Solves the configured problem in the configured mode.
pub fn solve(cfg: &LoadedConfig) -> Result<SolveReport, RunError> {
    match cfg.solve.mode {
        SolveMode::Els => multistart_solve(&cfg.spec, &cfg.solve).map_err(RunError::Solver),
        SolveMode::Ls => solve_direct(cfg).map_err(RunError::Solver),
    }
}

fn solve_direct(cfg: &LoadedConfig) -> crate::Result<SolveReport> {
    let spec = &cfg.spec;
    let a = solve_ls(spec)?;
    let objective = learning_functional(spec, &a)?;
    let resid = inf_norm(&residual_h(spec, &a, ResidualVariant::PaperFaithful)?);
    // the direct solve does not need the cube, so a degenerate Gram only
    // leaves the bound undefined
    let bound = delta_bound(spec).unwrap_or(DeltaBound {
        delta: f64::NAN,
        lambda_min: f64::NAN,
        i0: learning_functional(spec, &CoefficientVector::zeros(spec.n()))?,
        trivial: false,
    });
    let grad_inf = functional_grad_inf(spec, &a, f64::INFINITY)?;
    let record = StartRecord {
        start_index: 0,
        a0: CoefficientVector::zeros(spec.n()),
        final_a: a.clone(),
        final_objective: objective,
        final_grad_inf: grad_inf,
        final_resid_inf: resid,
        iters: 1,
        converged: true,
        admissible: true,
        trace: vec![TracePoint {
            iter: 0,
            objective,
            grad_inf,
        }],
    };
    Ok(SolveReport {
        mode: SolveMode::Ls,
        inner: cfg.solve.inner,
        best_a: a,
        objective,
        resid_paper_inf: resid,
        grad_inf,
        delta: bound.delta,
        lambda_min: bound.lambda_min,
        i0: bound.i0,
        trivial: false,
        no_admissible: false,
        starts_run: 1,
        admissible_count: 1,
        per_start: vec![record],
        seed: cfg.solve.seed,
    })
}

fn kebab<T: serde::Serialize>(v: &T) -> String {
    toml::Value::try_from(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn write_array(out: &mut String, key: &str, values: &[f64]) {
    let items: Vec<String> = values.iter().map(|&x| fmt_f64(x)).collect();
    let _ = writeln!(out, "{key} = [{}]", items.join(", "));
}

/// Renders a report as TOML.
pub fn format_report(report: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode = \"{}\"", kebab(&report.mode));
    let _ = writeln!(s, "inner = \"{}\"", kebab(&report.inner));
    let _ = writeln!(s, "seed = {}", report.seed);
    for (key, value) in [
        ("objective", report.objective),
        ("resid_paper_inf", report.resid_paper_inf),
        ("grad_inf", report.grad_inf),
        ("delta", report.delta),
        ("lambda_min", report.lambda_min),
        ("i0", report.i0),
    ] {
        let _ = writeln!(s, "{key} = {}", fmt_f64(value));
    }
    let _ = writeln!(s, "trivial = {}", report.trivial);
    let _ = writeln!(s, "no_admissible = {}", report.no_admissible);
    let _ = writeln!(s, "starts_run = {}", report.starts_run);
    let _ = writeln!(s, "admissible_count = {}", report.admissible_count);
    write_array(&mut s, "best_a", &report.best_a.to_vec());
    for r in &report.per_start {
        s.push_str("\n[[start]]\n");
        let _ = writeln!(s, "index = {}", r.start_index);
        let _ = writeln!(s, "objective = {}", fmt_f64(r.final_objective));
        let _ = writeln!(s, "grad_inf = {}", fmt_f64(r.final_grad_inf));
        let _ = writeln!(s, "resid_paper_inf = {}", fmt_f64(r.final_resid_inf));
        let _ = writeln!(s, "iters = {}", r.iters);
        let _ = writeln!(s, "converged = {}", r.converged);
        let _ = writeln!(s, "admissible = {}", r.admissible);
        write_array(&mut s, "a0", &r.a0.to_vec());
        write_array(&mut s, "final_a", &r.final_a.to_vec());
    }
    s
}

/// Renders the per-start iteration traces as CSV.
pub fn format_trace(report: &SolveReport) -> String {
    let mut s = String::from("start_index,iter,objective,grad_inf\n");
    for r in &report.per_start {
        for t in &r.trace {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.start_index,
                t.iter,
                fmt_f64(t.objective),
                fmt_f64(t.grad_inf)
            );
        }
    }
    s
}

/// Reads `best_a` back from report text.
pub fn parse_report_coefficients(text: &str) -> Result<CoefficientVector, String> {
    let doc: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
    let arr = doc
        .get("best_a")
        .and_then(toml::Value::as_array)
        .ok_or("missing best_a array")?;
    let values = arr
        .iter()
        .enumerate()
        .map(|(k, v)| match v {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(format!("best_a[{k}] is not a number")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoefficientVector::from_slice(&values))
}

pub fn read_report_coefficients(path: &Path) -> Result<CoefficientVector, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_report_coefficients(&text).map_err(|message| RunError::Report {
        path: path.to_path_buf(),
        message,
    })
}

pub fn mesh_file_name(req: &MeshRequest) -> String {
    format!("mesh_region{}_component{}.csv", req.region, req.component)
}

/// Tabulates one component of the section on a `grid × grid` lattice over
/// the region's box, returning `(coord1, coord2, value)` rows with `coord1`
/// varying slowest.
pub fn mesh_values(
    cfg: &LoadedConfig,
    a: &CoefficientVector,
    req: &MeshRequest,
) -> crate::Result<Vec<[f64; 3]>> {
    let region = cfg.region(req.region).ok_or_else(|| {
        crate::Error::InvalidParameter(format!("region {} is not declared", req.region))
    })?;
    let (lo, hi) = region.bounds().ok_or_else(|| {
        crate::Error::InvalidParameter(format!("region {} has no box", req.region))
    })?;
    let dx = cfg.region_dim(req.region).unwrap_or(1);
    let spec = &cfg.spec;
    let node = |k: usize, axis: usize| {
        let t = k as f64 / (req.grid - 1) as f64;
        lo[axis] + t * (hi[axis] - lo[axis])
    };
    let mut rows = Vec::with_capacity(req.grid * req.grid);
    for p in 0..req.grid {
        for q in 0..req.grid {
            let (x1, x2) = (node(p, 0), node(q, 1));
            let x = InputPoint::in_region(vec![x1, x2], req.region);
            let f = evaluate_section(a, spec.points(), spec.dims(), spec.kernel(), &x, dx)?;
            rows.push([x1, x2, f[req.component]]);
        }
    }
    Ok(rows)
}

pub fn format_mesh(rows: &[[f64; 3]]) -> String {
    let mut s = String::from("coord1,coord2,value\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", fmt_f64(r[0]), fmt_f64(r[1]), fmt_f64(r[2]));
    }
    s
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, contents).map_err(io_err(&path))?;
    Ok(path)
}

/// Writes one mesh file per request into `out_dir`.
pub fn write_meshes(
    cfg: &LoadedConfig,
    a: &CoefficientVector,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    if a.len() != cfg.spec.n() {
        return Err(RunError::Solver(crate::Error::Dimension(format!(
            "{} coefficients for a problem of dimension {}",
            a.len(),
            cfg.spec.n()
        ))));
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    cfg.outputs
        .mesh
        .iter()
        .map(|req| {
            let rows = mesh_values(cfg, a, req).map_err(RunError::Solver)?;
            write_file(out_dir.join(mesh_file_name(req)), &format_mesh(&rows))
        })
        .collect()
}

/// Paths written by [`write_artifacts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub report: PathBuf,
    pub trace: PathBuf,
    pub meshes: Vec<PathBuf>,
}

pub fn write_artifacts(
    cfg: &LoadedConfig,
    report: &SolveReport,
    out_dir: &Path,
) -> Result<Artifacts, RunError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let report_path = write_file(out_dir.join(&cfg.outputs.report), &format_report(report))?;
    let trace_path = write_file(out_dir.join(&cfg.outputs.trace), &format_trace(report))?;
    let meshes = write_meshes(cfg, &report.best_a, out_dir)?;
    Ok(Artifacts {
        report: report_path,
        trace: trace_path,
        meshes,
    })
}

/// Solves and writes all artifacts.
pub fn run(cfg: &LoadedConfig, out_dir: &Path) -> Result<(SolveReport, Artifacts), RunError> {
    let report = solve(cfg)?;
    let artifacts = write_artifacts(cfg, &report, out_dir)?;
    Ok((report, artifacts))
}

/// Structural diagnostics of a configured problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub gram: PsdCheck,
    pub regularizer: PsdCheck,
    /// Largest absolute row sum of the unnormalized graph Laplacian, when a
    /// graph is configured.
    pub laplacian_row_sum: Option<f64>,
    /// The search-cube bound, or why it is unavailable.
    pub delta: Result<DeltaBound, String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.gram.is_psd && self.regularizer.is_psd
    }
}

pub fn check(cfg: &LoadedConfig) -> Result<CheckReport, RunError> {
    let spec = &cfg.spec;
    let gram = check_psd(spec.gram().data(), PSD_TOL).map_err(RunError::Solver)?;
    let regularizer = check_psd(spec.regularizer().matrix(), PSD_TOL).map_err(RunError::Solver)?;
    let laplacian_row_sum = match &cfg.raw.problem.regularizer {
        Some(section) if section.within_view => {
            let sigma = section.sigma_graph.unwrap_or(cfg.raw.problem.kernel.sigma);
            let w = gaussian_weights(spec.points(), sigma, section.epsilon)
                .map_err(RunError::Solver)?;
            let l = graph_laplacian(&w, false).map_err(RunError::Solver)?;
            let m = l.matrix();
            Some(
                (0..m.nrows())
                    .map(|i| m.row(i).sum().abs())
                    .fold(0.0, f64::max),
            )
        }
        _ => None,
    };
    Ok(CheckReport {
        gram,
        regularizer,
        laplacian_row_sum,
        delta: delta_bound(spec).map_err(|e| e.to_string()),
    })
}

pub fn format_check(c: &CheckReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "gram_min_eig = {}", fmt_f64(c.gram.min_eig));
    let _ = writeln!(s, "gram_max_eig = {}", fmt_f64(c.gram.max_eig));
    let _ = writeln!(s, "gram_psd = {}", c.gram.is_psd);
    let _ = writeln!(
        s,
        "regularizer_min_eig = {}",
        fmt_f64(c.regularizer.min_eig)
    );
    let _ = writeln!(
        s,
        "regularizer_max_eig = {}",
        fmt_f64(c.regularizer.max_eig)
    );
    let _ = writeln!(s, "regularizer_psd = {}", c.regularizer.is_psd);
    if let Some(r) = c.laplacian_row_sum {
        let _ = writeln!(s, "laplacian_max_row_sum = {}", fmt_f64(r));
    }
    match &c.delta {
        Ok(b) => {
            let _ = writeln!(s, "delta = {}", fmt_f64(b.delta));
            let _ = writeln!(s, "lambda_min = {}", fmt_f64(b.lambda_min));
            let _ = writeln!(s, "i0 = {}", fmt_f64(b.i0));
        }
        Err(e) => {
            let _ = writeln!(s, "delta_unavailable = {:?}", e);
        }
    }
    s
}
