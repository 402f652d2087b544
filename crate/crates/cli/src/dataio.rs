//! File formats: labeled distance-matrix CSV, coordinate CSV, stress-trace
//! CSV and the JSON manifold-point format (complex entries as [re, im]
//! pairs). Floats are written with Rust's shortest round-trip formatting, so
//! save/load cycles reproduce values exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use geomds::linalg::{CMat, Mat};
use geomds::stress::{Configuration, DistanceMatrix, StressTrace};
use geomds::{pairwise_distances, ManifoldKind, ManifoldPoint, PointData};

use crate::error::{io_err, CliError, Result};

/// A loaded dataset: either a ready-made distance matrix or manifold points
/// whose pairwise geodesic distances still have to be computed.
#[derive(Clone, Debug)]
pub enum Dataset {
    RawDistances {
        labels: Vec<String>,
        distances: DistanceMatrix,
    },
    Points {
        kind: ManifoldKind,
        labels: Vec<String>,
        points: Vec<ManifoldPoint>,
    },
}

impl Dataset {
    pub fn n(&self) -> usize {
        match self {
            Dataset::RawDistances { labels, .. } | Dataset::Points { labels, .. } => labels.len(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            Dataset::RawDistances { labels, .. } | Dataset::Points { labels, .. } => labels,
        }
    }

    /// The distance matrix of the dataset, computing pairwise geodesic
    /// distances when the dataset holds points.
    pub fn to_distances(&self) -> Result<DistanceMatrix> {
        match self {
            Dataset::RawDistances { distances, .. } => Ok(distances.clone()),
            Dataset::Points { points, .. } => Ok(pairwise_distances(points)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    DistanceCsv,
    PointsJson,
}

pub fn infer_format(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::DistanceCsv),
        Some("json") => Ok(Format::PointsJson),
        other => Err(CliError::Usage(format!(
            "cannot infer format from extension {other:?} of {}; pass --format",
            path.display()
        ))),
    }
}

/// Loads and validates a dataset from disk.
pub fn load_dataset(path: &Path, format: Option<Format>) -> Result<Dataset> {
    let format = match format {
        Some(f) => f,
        None => infer_format(path)?,
    };
    match format {
        Format::DistanceCsv => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let (labels, distances) = parse_distance_csv(path, &text)?;
            Ok(Dataset::RawDistances { labels, distances })
        }
        Format::PointsJson => load_points_json(path),
    }
}

fn check_labels(path: &Path, labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() || l.contains(',') {
            return Err(CliError::Invalid {
                path: path.to_path_buf(),
                msg: format!("label {i} ({l:?}) must be non-empty and comma-free"),
            });
        }
        if labels[..i].contains(l) {
            return Err(CliError::Invalid {
                path: path.to_path_buf(),
                msg: format!("duplicate label {l:?}"),
            });
        }
    }
    Ok(())
}

/// Parses a labeled symmetric distance matrix:
/// an empty corner cell plus labels in the header row, then one row per
/// object starting with its label.
pub fn parse_distance_csv(path: &Path, text: &str) -> Result<(Vec<String>, DistanceMatrix)> {
    let perr = |line: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| perr(1, "empty file".to_string()))?;
    let mut fields = header.split(',');
    let corner = fields.next().unwrap_or_default();
    if !corner.trim().is_empty() {
        return Err(perr(
            1,
            format!("first header cell must be empty, got {corner:?}"),
        ));
    }
    let labels: Vec<String> = fields.map(|f| f.trim().to_string()).collect();
    let n = labels.len();
    if n < 2 {
        return Err(perr(1, format!("need at least 2 labels, got {n}")));
    }
    check_labels(path, &labels)?;

    let mut values = Mat::zeros(n, n);
    let mut row = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row >= n {
            return Err(perr(idx + 1, format!("more than {n} data rows")));
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or_default().trim();
        if label != labels[row] {
            return Err(perr(
                idx + 1,
                format!("row label {label:?} does not match header label {:?}", labels[row]),
            ));
        }
        let mut col = 0usize;
        for field in fields {
            if col >= n {
                return Err(perr(idx + 1, format!("more than {n} columns")));
            }
            let v: f64 = field.trim().parse().map_err(|e| {
                perr(idx + 1, format!("column {} ({field:?}): {e}", col + 2))
            })?;
            values[(row, col)] = v;
            col += 1;
        }
        if col != n {
            return Err(perr(idx + 1, format!("expected {n} columns, got {col}")));
        }
        row += 1;
    }
    if row != n {
        return Err(perr(0, format!("expected {n} data rows, got {row}")));
    }
    let distances = DistanceMatrix::new(values).map_err(|e| CliError::Invalid {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    Ok((labels, distances))
}

pub fn save_distances(path: &Path, labels: &[String], d: &DistanceMatrix) -> Result<()> {
    check_labels(path, labels)?;
    let n = d.n();
    assert_eq!(labels.len(), n, "labels and matrix size disagree");
    let mut out = String::new();
    out.push(',');
    out.push_str(&labels.join(","));
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for j in 0..n {
            let _ = write!(out, ",{}", d.get(i, j));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn axis_names(p: usize) -> Vec<String> {
    if p <= 3 {
        ["x", "y", "z"][..p].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=p).map(|a| format!("a{a}")).collect()
    }
}

pub fn save_coords(path: &Path, labels: &[String], z: &Configuration) -> Result<()> {
    check_labels(path, labels)?;
    assert_eq!(labels.len(), z.n(), "labels and coordinates disagree");
    let mut out = String::new();
    out.push_str("label,");
    out.push_str(&axis_names(z.p()).join(","));
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for v in z.row(i) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Loads a coordinate CSV (label column plus one column per axis).
pub fn load_coords(path: &Path) -> Result<(Vec<String>, Configuration)> {
    let perr = |line: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| perr(1, "empty file".to_string()))?;
    let p = header.split(',').count().saturating_sub(1);
    if p == 0 {
        return Err(perr(1, "header has no coordinate columns".to_string()));
    }
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or_default().trim().to_string();
        let mut row = Vec::with_capacity(p);
        for field in fields {
            let v: f64 = field.trim().parse().map_err(|e| {
                perr(idx + 1, format!("field {field:?}: {e}"))
            })?;
            row.push(v);
        }
        if row.len() != p {
            return Err(perr(
                idx + 1,
                format!("expected {p} coordinates, got {}", row.len()),
            ));
        }
        labels.push(label);
        rows.push(row);
    }
    if labels.is_empty() {
        return Err(perr(0, "no data rows".to_string()));
    }
    check_labels(path, &labels)?;
    Ok((labels, Configuration::from_rows(&rows)))
}

pub fn save_trace(path: &Path, trace: &StressTrace) -> Result<()> {
    let mut out = String::new();
    if trace.db.is_empty() {
        out.push_str("iter,stress\n");
        for (k, v) in trace.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{v}");
        }
    } else {
        out.push_str("iter,stress,stress_db\n");
        for (k, (v, db)) in trace.values.iter().zip(&trace.db).enumerate() {
            let _ = writeln!(out, "{k},{v},{db}");
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

type KindCtor = fn(usize) -> ManifoldKind;

const KIND_TAGS: [(&str, KindCtor); 4] = [
    ("so", ManifoldKind::SpecialOrthogonal),
    ("sphere", ManifoldKind::UnitSphere),
    ("spd", ManifoldKind::SymmetricPositiveDefinite),
    ("su", ManifoldKind::SpecialUnitary),
];

pub fn kind_tag(kind: ManifoldKind) -> &'static str {
    match kind {
        ManifoldKind::SpecialOrthogonal(_) => "so",
        ManifoldKind::UnitSphere(_) => "sphere",
        ManifoldKind::SymmetricPositiveDefinite(_) => "spd",
        ManifoldKind::SpecialUnitary(_) => "su",
    }
}

pub fn parse_kind(tag: &str, q: usize) -> Option<ManifoldKind> {
    KIND_TAGS
        .iter()
        .find(|(t, _)| *t == tag)
        .map(|(_, ctor)| ctor(q))
}

#[derive(Serialize, Deserialize)]
struct PointsFile {
    kind: String,
    q: usize,
    labels: Vec<String>,
    points: Vec<PointEntries>,
}

/// Row-major entries of one point: plain numbers for real manifolds,
/// [re, im] pairs for the special unitary group.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointEntries {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

fn point_to_entries(p: &ManifoldPoint) -> PointEntries {
    match p.data() {
        PointData::Vector(v) => PointEntries::Real(v.clone()),
        PointData::Real(m) => PointEntries::Real(m.data().to_vec()),
        PointData::Complex(m) => {
            let q = m.rows();
            let mut flat = Vec::with_capacity(q * q);
            for i in 0..q {
                for j in 0..q {
                    let c = m[(i, j)];
                    flat.push([c.re, c.im]);
                }
            }
            PointEntries::Complex(flat)
        }
    }
}

fn entries_to_point(
    kind: ManifoldKind,
    entries: &PointEntries,
    path: &Path,
    index: usize,
) -> Result<ManifoldPoint> {
    let q = kind.q();
    let invalid = |msg: String| CliError::Invalid {
        path: path.to_path_buf(),
        msg: format!("point {index}: {msg}"),
    };
    let data = match (kind, entries) {
        (ManifoldKind::UnitSphere(_), PointEntries::Real(v)) => {
            if v.len() != q {
                return Err(invalid(format!("expected {q} entries, got {}", v.len())));
            }
            PointData::Vector(v.clone())
        }
        (
            ManifoldKind::SpecialOrthogonal(_) | ManifoldKind::SymmetricPositiveDefinite(_),
            PointEntries::Real(v),
        ) => {
            if v.len() != q * q {
                return Err(invalid(format!(
                    "expected {} row-major entries, got {}",
                    q * q,
                    v.len()
                )));
            }
            PointData::Real(Mat::from_fn(q, q, |i, j| v[i * q + j]))
        }
        (ManifoldKind::SpecialUnitary(_), PointEntries::Complex(v)) => {
            if v.len() != q * q {
                return Err(invalid(format!(
                    "expected {} row-major [re, im] pairs, got {}",
                    q * q,
                    v.len()
                )));
            }
            PointData::Complex(CMat::from_fn(q, q, |i, j| {
                let [re, im] = v[i * q + j];
                Complex64::new(re, im)
            }))
        }
        _ => {
            return Err(invalid(
                "entry style does not match the manifold kind".to_string(),
            ))
        }
    };
    ManifoldPoint::new(kind, data).map_err(|e| invalid(e.to_string()))
}

pub fn save_points(
    path: &Path,
    kind: ManifoldKind,
    labels: &[String],
    points: &[ManifoldPoint],
) -> Result<()> {
    check_labels(path, labels)?;
    assert_eq!(labels.len(), points.len(), "labels and points disagree");
    let file = PointsFile {
        kind: kind_tag(kind).to_string(),
        q: kind.q(),
        labels: labels.to_vec(),
        points: points.iter().map(point_to_entries).collect(),
    };
    let json = serde_json::to_string_pretty(&file).expect("points serialize");
    fs::write(path, json + "\n").map_err(io_err(path))
}

fn load_points_json(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: PointsFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let kind = parse_kind(&file.kind, file.q).ok_or_else(|| CliError::Invalid {
        path: path.to_path_buf(),
        msg: format!(
            "unknown manifold kind {:?} (expected so, sphere, spd or su)",
            file.kind
        ),
    })?;
    if file.labels.len() != file.points.len() {
        return Err(CliError::Invalid {
            path: path.to_path_buf(),
            msg: format!(
                "{} labels but {} points",
                file.labels.len(),
                file.points.len()
            ),
        });
    }
    check_labels(path, &file.labels)?;
    let points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, e)| entries_to_point(kind, e, path, i))
        .collect::<Result<Vec<ManifoldPoint>>>()?;
    Ok(Dataset::Points {
        kind,
        labels: file.labels,
        points,
    })
}

/// Everything a run produces: the embedding, the trace and both distance
/// matrices (input target and embedded Euclidean).
#[derive(Clone, Debug)]
pub struct RunReport {
    pub labels: Vec<String>,
    pub coords: Configuration,
    pub trace: StressTrace,
    pub dist_in: DistanceMatrix,
    pub dist_out: DistanceMatrix,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Connect consecutive points in the scatter panel (trajectory runs).
    pub trajectory: bool,
}

impl RunReport {
    pub fn new(
        labels: Vec<String>,
        coords: Configuration,
        trace: StressTrace,
        dist_in: DistanceMatrix,
        outer_iterations: usize,
        converged: bool,
    ) -> Self {
        let dist_out = DistanceMatrix::from_configuration(&coords);
        Self {
            labels,
            coords,
            trace,
            dist_in,
            dist_out,
            outer_iterations,
            converged,
            trajectory: false,
        }
    }

    /// Writes coords.csv, trace.csv, dist_in.csv, dist_out.csv and
    /// figure.svg into `dir`, creating it if needed. Returns the file paths.
    pub fn write_files(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let coords = dir.join("coords.csv");
        save_coords(&coords, &self.labels, &self.coords)?;
        let trace = dir.join("trace.csv");
        save_trace(&trace, &self.trace)?;
        let dist_in = dir.join("dist_in.csv");
        save_distances(&dist_in, &self.labels, &self.dist_in)?;
        let dist_out = dir.join("dist_out.csv");
        save_distances(&dist_out, &self.labels, &self.dist_out)?;
        let figure = dir.join("figure.svg");
        crate::svg::emit_svg(self, &figure)?;
        Ok(vec![coords, trace, dist_in, dist_out, figure])
    }
}
