//! Datasets for the logistic-regression case study: synthetic two-cloud
//! generation, a sparse `label idx:val ...` text format, and the
//! standardise-then-row-normalise preprocessing pipeline.

use std::fs;
use std::path::Path;

use crate::error::Error;
use crate::linalg;
use crate::sampling;
use crate::Result;

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Synthetic { seed: u64 },
    Loaded { path: String },
}

/// Dense row-major feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_samples: usize,
    dim: usize,
    features: Vec<f64>, // n_samples * dim, row major
    labels: Vec<u8>,    // each 0 or 1
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(features: Vec<f64>, labels: Vec<u8>, dim: usize, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dataset("feature dimension must be positive".into()));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::Dataset(format!(
                "feature buffer has {} entries, expected {} rows x {} columns",
                features.len(),
                labels.len(),
                dim
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::Dataset("labels must be 0 or 1".into()));
        }
        Ok(Dataset { n_samples: labels.len(), dim, features, labels, provenance })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.features[k * self.dim..(k + 1) * self.dim]
    }

    pub fn label(&self, k: usize) -> u8 {
        self.labels[k]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// A copy with every feature multiplied by `factor`. Equivalent to a
    /// uniform reparameterisation of the decision vector.
    pub fn scaled(&self, factor: f64) -> Dataset {
        let mut d = self.clone();
        for v in d.features.iter_mut() {
            *v *= factor;
        }
        d
    }
}

/// Two Gaussian class clouds in ℝ^dim with unit within-class variance per
/// coordinate and the class means `separation` apart along a seeded random
/// direction. Labels alternate so classes stay balanced. Deterministic per
/// seed.
pub fn generate_synthetic(n_samples: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n_samples < 2 {
        return Err(Error::Dataset("synthetic generation needs at least 2 samples".into()));
    }
    if dim == 0 {
        return Err(Error::Dataset("feature dimension must be positive".into()));
    }
    let mut rng = sampling::rng_from_seed(seed);
    let mut direction = sampling::standard_normal_vector(dim, &mut rng);
    let n = linalg::norm(&direction).max(1e-300);
    for d in direction.iter_mut() {
        *d /= n;
    }
    let mut features = Vec::with_capacity(n_samples * dim);
    let mut labels = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let y = (k % 2) as u8;
        let sign = if y == 1 { 1.0 } else { -1.0 };
        let noise = sampling::standard_normal_vector(dim, &mut rng);
        for j in 0..dim {
            features.push(sign * 0.5 * separation * direction[j] + noise[j]);
        }
        labels.push(y);
    }
    Dataset::new(features, labels, dim, Provenance::Synthetic { seed })
}

/// Parse the sparse text format, one sample per line:
/// `label idx:val idx:val ...` with 1-based strictly increasing indices.
/// Labels may be 0/1 or -1/+1 (-1 maps to 0). Unmentioned indices are zero.
///
/// `declared_dim` enforces a maximum index when given; otherwise the
/// dimension is inferred from the largest index seen (at least 1).
pub fn parse_sparse_text(text: &str, declared_dim: Option<usize>) -> Result<Dataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    let mut max_index = 0usize;

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label_tok = parts.next().ok_or_else(|| Error::parse(line_no, "missing label"))?;
        let label_val: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("unparseable label '{label_tok}'")))?;
        let label = if label_val == 1.0 {
            1u8
        } else if label_val == 0.0 || label_val == -1.0 {
            0u8
        } else {
            return Err(Error::parse(line_no, format!("label {label_val} not in {{0,1,-1,+1}}")));
        };

        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut last_index = 0usize;
        for tok in parts {
            let (idx_s, val_s) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx_s
                .parse()
                .map_err(|_| Error::parse(line_no, format!("unparseable index '{idx_s}'")))?;
            if idx == 0 {
                return Err(Error::parse(line_no, "indices are 1-based; got 0"));
            }
            if idx <= last_index {
                return Err(Error::parse(
                    line_no,
                    format!("indices must be strictly increasing; {idx} follows {last_index}"),
                ));
            }
            if let Some(m) = declared_dim {
                if idx > m {
                    return Err(Error::parse(line_no, format!("index {idx} exceeds declared dimension {m}")));
                }
            }
            let val: f64 = val_s
                .parse()
                .map_err(|_| Error::parse(line_no, format!("unparseable value '{val_s}'")))?;
            if !val.is_finite() {
                return Err(Error::parse(line_no, format!("non-finite value '{val_s}'")));
            }
            last_index = idx;
            entries.push((idx, val));
        }
        max_index = max_index.max(last_index);
        rows.push(entries);
        labels.push(label);
    }

    let dim = declared_dim.unwrap_or(max_index.max(1));
    let mut features = vec![0.0; rows.len() * dim];
    for (k, entries) in rows.iter().enumerate() {
        for &(idx, val) in entries {
            features[k * dim + (idx - 1)] = val;
        }
    }
    Dataset::new(features, labels, dim, Provenance::Loaded { path: "<inline>".into() })
}

/// Load the sparse text format from a file.
pub fn load_sparse_text(path: impl AsRef<Path>, declared_dim: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut d = parse_sparse_text(&text, declared_dim)?;
    d.provenance = Provenance::Loaded { path: path.display().to_string() };
    Ok(d)
}

/// Serialise to the same sparse text format, 17 significant digits.
pub fn to_sparse_text(d: &Dataset) -> String {
    let mut out = String::new();
    for k in 0..d.n_samples() {
        out.push_str(if d.label(k) == 1 { "1" } else { "0" });
        for (j, &v) in d.row(k).iter().enumerate() {
            if v != 0.0 {
                out.push_str(&format!(" {}:{:.16e}", j + 1, v));
            }
        }
        out.push('\n');
    }
    out
}

/// Standardise columns to mean zero and unit sample variance (unbiased N−1
/// denominator; zero-variance columns are mapped to all zeros), then
/// normalise every row to unit Euclidean norm.
///
/// The mean/variance guarantees refer to the intermediate standardised
/// matrix; the final row normalisation rescales rows individually and is a
/// fixpoint (normalising again changes nothing).
pub fn preprocess(d: &Dataset) -> Result<Dataset> {
    let n = d.n_samples();
    if n < 2 {
        return Err(Error::Dataset(format!("preprocessing needs at least 2 samples, got {n}")));
    }
    let m = d.dim();
    let mut features = d.features.clone();

    for j in 0..m {
        let mean: f64 = (0..n).map(|k| features[k * m + j]).sum::<f64>() / n as f64;
        let var: f64 = (0..n).map(|k| (features[k * m + j] - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        if var > 0.0 {
            let inv_sd = 1.0 / var.sqrt();
            for k in 0..n {
                let v = &mut features[k * m + j];
                *v = (*v - mean) * inv_sd;
            }
        } else {
            for k in 0..n {
                features[k * m + j] = 0.0;
            }
        }
    }

    for k in 0..n {
        let row = &features[k * m..(k + 1) * m];
        let norm = linalg::norm(row);
        if norm == 0.0 {
            return Err(Error::Dataset(format!(
                "row {k} is identically zero after standardisation and cannot be normalised"
            )));
        }
        for j in 0..m {
            features[k * m + j] /= norm;
        }
    }

    Dataset::new(features, d.labels.clone(), m, d.provenance.clone())
}
