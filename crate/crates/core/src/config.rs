//! Run configuration files.
//!
//! A run is described by a TOML document with three tables: `[problem]`
//! (points, labels, loss, regularization weights, kernel and graph recipe),
//! `[solve]` (a [`SolveConfig`]) and `[outputs]` (artifact paths and mesh
//! requests). Points may be listed inline as `[[problem.points]]` entries or
//! read from a CSV file with one row per point: the coordinates followed by
//! the label components, which are left empty for unlabeled rows.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{toy_region_dim, InputPoint, KernelConfig, KernelKind, SpaceDims};
use crate::loss::LossKind;
use crate::objective::{ProblemInputs, ProblemSpec};
use crate::regularizer::{
    between_view_for_layout, combine_regularizer, gaussian_weights, graph_laplacian,
    within_view_embed, RegularizerConfig, RegularizerOperator,
};
use crate::solver::SolveConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("invalid problem: {0}")]
    Model(#[from] crate::Error),
}

fn field(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub outputs: OutputsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub loss: LossKind,
    pub gamma_a: f64,
    #[serde(default)]
    pub gamma_i: f64,
    pub kernel: KernelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularizer: Option<RegularizerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_csv: Option<CsvSource>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<u8>,
    /// Coefficient dimension; defaults to the region's dimension, then 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Vec<f64>>,
    /// Rows of the combination operator `C_i`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combination: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    /// Relative paths resolve against the configuration file's directory.
    pub path: String,
    /// Number of leading coordinate columns.
    pub ambient_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub id: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Box corners; points tagged with the region must lie inside, and
    /// meshes are tabulated over it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

impl RegionSection {
    pub fn bounds(&self) -> Option<(&[f64], &[f64])> {
        Some((self.lower.as_deref()?, self.upper.as_deref()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizerSection {
    /// Graph weight width; defaults to the kernel's sigma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_graph: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub normalized: bool,
    #[serde(default = "yes")]
    pub within_view: bool,
    /// Number of views for between-view regularization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub between_views: Option<usize>,
    #[serde(default)]
    pub gamma_b: f64,
    /// Defaults to `gamma_i`, which makes `M = M_W` when `gamma_b = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_w: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mesh: Vec<MeshRequest>,
}

fn default_report() -> String {
    "report.toml".into()
}

fn default_trace() -> String {
    "trace.csv".into()
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self {
            report: default_report(),
            trace: default_trace(),
            mesh: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshRequest {
    pub region: u8,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub component: usize,
}

fn default_grid() -> usize {
    50
}

/// A configuration that has been turned into a validated problem.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub raw: RunConfig,
    pub spec: ProblemSpec,
    pub solve: SolveConfig,
    pub outputs: OutputsSection,
    pub regions: Vec<RegionSection>,
}

impl LoadedConfig {
    pub fn region(&self, id: u8) -> Option<&RegionSection> {
        self.regions.iter().find(|r| r.id == id)
    }

    /// Output dimension of sections evaluated in `region`.
    pub fn region_dim(&self, id: u8) -> Option<usize> {
        region_dim(&self.raw.problem, id)
    }
}

fn region_dim(problem: &ProblemSection, id: u8) -> Option<usize> {
    problem
        .regions
        .iter()
        .find(|r| r.id == id)
        .and_then(|r| r.dim)
        .or_else(|| match problem.kernel.kind {
            KernelKind::ToyBlock => toy_region_dim(id),
            KernelKind::ScalarGaussian => None,
        })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    load_config_str(&text, base)
}

/// Parses and validates configuration text; relative CSV paths resolve
/// against `base_dir`.
pub fn load_config_str(text: &str, base_dir: &Path) -> Result<LoadedConfig, ConfigError> {
    let raw: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate(raw, base_dir)
}

/// Serializes a configuration back to TOML.
pub fn write_config(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("run configuration is always representable as TOML")
}

fn read_csv_points(src: &CsvSource, base_dir: &Path) -> Result<Vec<PointEntry>, ConfigError> {
    let path = base_dir.join(&src.path);
    let fpath = "problem.points_csv";
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| field(fpath, format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| field(format!("{fpath} row {}", row + 1), e.to_string()))?;
        let parse = |s: &str, col: usize| -> Result<f64, ConfigError> {
            s.parse::<f64>().map_err(|_| {
                field(
                    format!("{fpath} row {} column {}", row + 1, col + 1),
                    format!("not a number: {s:?}"),
                )
            })
        };
        if record.len() < src.ambient_dim {
            return Err(field(
                format!("{fpath} row {}", row + 1),
                format!(
                    "expected at least {} coordinate columns, found {}",
                    src.ambient_dim,
                    record.len()
                ),
            ));
        }
        let coords = (0..src.ambient_dim)
            .map(|c| parse(&record[c], c))
            .collect::<Result<Vec<_>, _>>()?;
        let label_cells: Vec<(usize, &str)> = (src.ambient_dim..record.len())
            .map(|c| (c, &record[c]))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        let label = if label_cells.is_empty() {
            None
        } else {
            Some(
                label_cells
                    .into_iter()
                    .map(|(c, s)| parse(s, c))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        out.push(PointEntry {
            coords,
            region: src.regions.as_ref().and_then(|r| r.get(row).copied()),
            dim: src.dims.as_ref().and_then(|d| d.get(row).copied()),
            label,
            combination: None,
        });
    }
    for (name, len) in [
        ("regions", src.regions.as_ref().map(Vec::len)),
        ("dims", src.dims.as_ref().map(Vec::len)),
    ] {
        if let Some(len) = len {
            if len != out.len() {
                return Err(field(
                    format!("{fpath}.{name}"),
                    format!("{len} entries for {} rows", out.len()),
                ));
            }
        }
    }
    Ok(out)
}

fn validate(raw: RunConfig, base_dir: &Path) -> Result<LoadedConfig, ConfigError> {
    let problem = &raw.problem;
    if !(problem.gamma_a > 0.0 && problem.gamma_a.is_finite()) {
        return Err(field(
            "problem.gamma_a",
            format!("must be positive, got {}", problem.gamma_a),
        ));
    }
    if !(problem.gamma_i >= 0.0 && problem.gamma_i.is_finite()) {
        return Err(field(
            "problem.gamma_i",
            format!("must be nonnegative, got {}", problem.gamma_i),
        ));
    }
    problem
        .kernel
        .validate()
        .map_err(|e| field("problem.kernel", e.to_string()))?;
    raw.solve
        .validate()
        .map_err(|e| field("solve", e.to_string()))?;

    let mut entries = problem.points.clone();
    if let Some(src) = &problem.points_csv {
        entries.extend(read_csv_points(src, base_dir)?);
    }
    if entries.is_empty() {
        return Err(field("problem.points", "no points given"));
    }

    let mut seen_regions = std::collections::BTreeSet::new();
    for (k, r) in problem.regions.iter().enumerate() {
        let path = format!("problem.regions[{k}]");
        if !seen_regions.insert(r.id) {
            return Err(field(path, format!("region {} declared twice", r.id)));
        }
        if r.dim == Some(0) {
            return Err(field(format!("{path}.dim"), "must be at least 1"));
        }
        if r.lower.is_some() != r.upper.is_some() {
            return Err(field(path, "lower and upper must be given together"));
        }
        if let Some((lo, hi)) = r.bounds() {
            if lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                return Err(field(
                    path,
                    "lower must be strictly below upper, same length",
                ));
            }
        }
    }

    let ambient = entries[0].coords.len();
    let mut points = Vec::with_capacity(entries.len());
    let mut d = Vec::with_capacity(entries.len());
    let mut e = Vec::with_capacity(entries.len());
    let mut labels = Vec::new();
    let mut combos = Vec::with_capacity(entries.len());
    let mut any_combination = false;
    for (i, p) in entries.iter().enumerate() {
        let path = format!("problem.points[{i}]");
        if p.coords.len() != ambient {
            return Err(field(
                format!("{path}.coords"),
                format!("has {} coordinates, expected {ambient}", p.coords.len()),
            ));
        }
        if let Some(region) = p.region {
            if let Some(r) = problem.regions.iter().find(|r| r.id == region) {
                if let Some((lo, hi)) = r.bounds() {
                    let inside = lo.len() == ambient
                        && p.coords
                            .iter()
                            .zip(lo.iter().zip(hi))
                            .all(|(x, (a, b))| *a <= *x && *x <= *b);
                    if !inside {
                        return Err(field(
                            format!("{path}.coords"),
                            format!("{:?} lies outside region {region}", p.coords),
                        ));
                    }
                }
            } else if !problem.regions.is_empty() {
                return Err(field(
                    format!("{path}.region"),
                    format!("region {region} is not declared"),
                ));
            }
        }
        let di = p
            .dim
            .or_else(|| p.region.and_then(|r| region_dim(problem, r)))
            .unwrap_or(1);
        if di == 0 {
            return Err(field(format!("{path}.dim"), "must be at least 1"));
        }
        let ci = match &p.combination {
            Some(rows) => {
                any_combination = true;
                if rows.is_empty() || rows.iter().any(|r| r.len() != di) {
                    return Err(field(
                        format!("{path}.combination"),
                        format!("needs at least one row, each of length {di}"),
                    ));
                }
                DMatrix::from_fn(rows.len(), di, |r, c| rows[r][c])
            }
            None => DMatrix::identity(di, di),
        };
        let ei = ci.nrows();
        if let Some(y) = &p.label {
            if labels.len() != i {
                return Err(field(
                    format!("{path}.label"),
                    "labeled points must precede unlabeled points",
                ));
            }
            if y.len() != ei {
                return Err(field(
                    format!("{path}.label"),
                    format!("has length {}, label space has dimension {ei}", y.len()),
                ));
            }
            labels.push(DVector::from_column_slice(y));
        }
        points.push(InputPoint {
            coords: p.coords.clone(),
            region: p.region,
        });
        d.push(di);
        e.push(ei);
        combos.push(ci);
    }
    if labels.is_empty() {
        return Err(field("problem.points", "at least one point needs a label"));
    }
    let dims = SpaceDims::new(d, e)?;

    let regularizer = build_regularizer(problem, &points, &dims)?;
    let spec = ProblemSpec::new(ProblemInputs {
        points,
        labels,
        dims,
        combinations: any_combination.then_some(combos),
        regularizer,
        gamma_a: problem.gamma_a,
        gamma_i: problem.gamma_i,
        kernel: problem.kernel,
        loss: problem.loss,
    })?;

    for (k, m) in raw.outputs.mesh.iter().enumerate() {
        let path = format!("outputs.mesh[{k}]");
        let region = problem
            .regions
            .iter()
            .find(|r| r.id == m.region)
            .ok_or_else(|| field(&path, format!("region {} is not declared", m.region)))?;
        let Some((lo, _)) = region.bounds() else {
            return Err(field(&path, format!("region {} has no box", m.region)));
        };
        if lo.len() != 2 {
            return Err(field(&path, "meshes need a two-dimensional input space"));
        }
        let dim = region_dim(problem, m.region).unwrap_or(1);
        if m.component >= dim {
            return Err(field(
                format!("{path}.component"),
                format!("region {} has output dimension {dim}", m.region),
            ));
        }
        if m.grid < 2 {
            return Err(field(
                format!("{path}.grid"),
                "needs at least 2 nodes per axis",
            ));
        }
    }

    Ok(LoadedConfig {
        solve: raw.solve.clone(),
        outputs: raw.outputs.clone(),
        regions: raw.problem.regions.clone(),
        spec,
        raw,
    })
}

fn build_regularizer(
    problem: &ProblemSection,
    points: &[InputPoint],
    dims: &SpaceDims,
) -> Result<RegularizerOperator, ConfigError> {
    let Some(section) = &problem.regularizer else {
        return Ok(RegularizerOperator::zero(dims.clone()));
    };
    if problem.gamma_i == 0.0 {
        return Ok(RegularizerOperator::zero(dims.clone()));
    }
    let cfg = RegularizerConfig {
        gamma_i: problem.gamma_i,
        gamma_b: section.gamma_b,
        gamma_w: section.gamma_w.unwrap_or(problem.gamma_i),
        sigma_graph: section.sigma_graph.unwrap_or(problem.kernel.sigma),
        epsilon_neighbor: section.epsilon,
        normalized: section.normalized,
    };
    let within = if section.within_view {
        let w = gaussian_weights(points, cfg.sigma_graph, cfg.epsilon_neighbor)
            .map_err(|e| field("problem.regularizer", e.to_string()))?;
        let l = graph_laplacian(&w, cfg.normalized)
            .map_err(|e| field("problem.regularizer", e.to_string()))?;
        Some(within_view_embed(&l, dims)?)
    } else {
        None
    };
    let between = match section.between_views {
        Some(m) => Some(
            between_view_for_layout(m, dims)
                .map_err(|e| field("problem.regularizer.between_views", e.to_string()))?,
        ),
        None => None,
    };
    if within.is_none() && between.is_none() {
        return Err(field(
            "problem.regularizer",
            "enable within_view or set between_views",
        ));
    }
    Ok(combine_regularizer(
        &cfg,
        between.as_ref(),
        within.as_ref(),
    )?)
}
