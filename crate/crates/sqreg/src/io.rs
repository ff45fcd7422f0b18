//! File formats: dataset CSV, curve and band CSV, selection tables, chain
//! trace dumps, the fit manifest, and transform sidecars.
//!
//! Numeric cells are serialized with 17 significant digits so identical
//! configurations produce byte-identical files.

use crate::bands::CredibleBand;
use crate::model::{Dataset, ModelError};
use crate::model_select::DomainFit;
use crate::sampler::ChainResult;
use crate::transforms::UnitTransform;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: missing column '{column}'")]
    MissingColumn { path: String, column: String },
    #[error("{path} row {row}: cannot parse '{value}' as a number")]
    BadNumber {
        path: String,
        row: usize,
        value: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// 17-significant-digit decimal form; round-trips f64 exactly.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn open_writer(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
}

fn write_all(path: &Path, contents: &str) -> Result<(), IoError> {
    let mut writer = open_writer(path)?;
    writer
        .write_all(contents.as_bytes())
        .map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
}

/// Writes a dataset as two-column CSV with an `x,y` header.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), IoError> {
    let mut out = String::from("x,y\n");
    for (x, y) in data.iter() {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&fmt_f64(y));
        out.push('\n');
    }
    write_all(path, &out)
}

/// Reads a dataset from CSV. The header row is required; column names are
/// configurable. Rows failing the unit-square check abort with the row
/// index (no silent dropping).
pub fn read_dataset(path: &Path, x_column: &str, y_column: &str) -> Result<Dataset, IoError> {
    let (xs, ys) = read_two_columns(path, x_column, y_column)?;
    Ok(Dataset::new(xs, ys)?)
}

/// Reads two named numeric columns from a headed CSV file.
pub fn read_two_columns(
    path: &Path,
    first: &str,
    second: &str,
) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|source| IoError::Csv {
        path: display.clone(),
        source,
    })?;
    let headers = reader
        .headers()
        .map_err(|source| IoError::Csv {
            path: display.clone(),
            source,
        })?
        .clone();
    let find = |name: &str| -> Result<usize, IoError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::MissingColumn {
                path: display.clone(),
                column: name.to_string(),
            })
    };
    let ix = find(first)?;
    let iy = find(second)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|source| IoError::Csv {
            path: display.clone(),
            source,
        })?;
        let parse = |index: usize| -> Result<f64, IoError> {
            let raw = record.get(index).unwrap_or("");
            raw.trim().parse().map_err(|_| IoError::BadNumber {
                path: display.clone(),
                row,
                value: raw.to_string(),
            })
        };
        xs.push(parse(ix)?);
        ys.push(parse(iy)?);
    }
    Ok((xs, ys))
}

/// Reads one named numeric column.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, IoError> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|source| IoError::Csv {
        path: display.clone(),
        source,
    })?;
    let headers = reader
        .headers()
        .map_err(|source| IoError::Csv {
            path: display.clone(),
            source,
        })?
        .clone();
    let index = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| IoError::MissingColumn {
            path: display.clone(),
            column: column.to_string(),
        })?;
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|source| IoError::Csv {
            path: display.clone(),
            source,
        })?;
        let raw = record.get(index).unwrap_or("");
        values.push(raw.trim().parse().map_err(|_| IoError::BadNumber {
            path: display.clone(),
            row,
            value: raw.to_string(),
        })?);
    }
    Ok(values)
}

/// Writes a table of named curves sampled on a shared grid.
pub fn write_curves(
    path: &Path,
    grid: &[f64],
    columns: &[(&str, &[f64])],
) -> Result<(), IoError> {
    let mut out = String::from("tau");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &tau) in grid.iter().enumerate() {
        out.push_str(&fmt_f64(tau));
        for (_, values) in columns {
            out.push(',');
            out.push_str(&fmt_f64(values[i]));
        }
        out.push('\n');
    }
    write_all(path, &out)
}

/// Band CSV: tau, center, lower, upper, lower_inflated, upper_inflated.
pub fn write_band(path: &Path, grid: &[f64], band: &CredibleBand) -> Result<(), IoError> {
    let mut out = String::from("tau,center,lower,upper,lower_inflated,upper_inflated\n");
    for (i, &tau) in grid.iter().enumerate() {
        let center = band.center[i];
        let cells = [
            tau,
            center,
            center - band.radius,
            center + band.radius,
            center - band.inflated_radius,
            center + band.inflated_radius,
        ];
        let row: Vec<String> = cells.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_all(path, &out)
}

/// One row of the model-selection table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionRow {
    pub k: usize,
    pub log_marginal: f64,
    pub weight: f64,
}

/// Writes the selection table as CSV and JSON next to each other.
pub fn write_selection(
    csv_path: &Path,
    json_path: &Path,
    rows: &[SelectionRow],
) -> Result<(), IoError> {
    let mut out = String::from("k,log_marginal,weight\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.k,
            fmt_f64(row.log_marginal),
            fmt_f64(row.weight)
        ));
    }
    write_all(csv_path, &out)?;
    write_json(json_path, rows)
}

/// Chain-trace dump: one record per stored iteration with the flattened
/// state.
pub fn write_trace(path: &Path, chain: &ChainResult) -> Result<(), IoError> {
    let dim = chain.basis().spacing_dim();
    let mut out = String::from("iteration,log_likelihood");
    for j in 0..dim {
        out.push_str(&format!(",gamma{j}"));
    }
    for j in 0..dim {
        out.push_str(&format!(",delta{j}"));
    }
    out.push('\n');
    for (i, ((gamma, delta), ll)) in chain
        .states
        .iter()
        .zip(&chain.log_likelihoods)
        .enumerate()
    {
        out.push_str(&format!("{i},{}", fmt_f64(*ll)));
        for v in gamma.as_slice().iter().chain(delta.as_slice()) {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    write_all(path, &out)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let json = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_all(path, &(json + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let file = File::open(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_reader(file).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Transform sidecar recording how a raw table was mapped onto the unit
/// square, sufficient to invert predictions later.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformSidecar {
    pub predictor_column: String,
    pub response_column: String,
    pub predictor: UnitTransform,
    pub response: UnitTransform,
}

/// Everything needed to reproduce a fit: configuration, seeds, and per-k
/// results including posterior-mean coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitManifest {
    pub rng: String,
    pub degree: usize,
    pub domain: Vec<usize>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub proposal_mode: String,
    pub initial_r: f64,
    pub target_acceptance: f64,
    pub inversion_tol: f64,
    pub ordinate_point: String,
    pub chib_denominator_draws: usize,
    pub chib_numerator_samples: Option<usize>,
    pub sample_size: usize,
    pub level: f64,
    pub x_slices: Vec<f64>,
    pub eb_k: usize,
    pub per_k: Vec<ManifestResolution>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestResolution {
    pub k: usize,
    pub chain_seed: u64,
    pub chib_seed: u64,
    pub acceptance_rate: f64,
    pub r: f64,
    pub log_marginal: f64,
    pub weight: f64,
    pub numerator_samples: usize,
    pub denominator_draws: usize,
    pub posterior_mean_theta: Vec<f64>,
    pub posterior_mean_phi: Vec<f64>,
}

impl FitManifest {
    pub fn from_fit(
        fit: &DomainFit,
        config: &crate::model_select::FitConfig,
        sample_size: usize,
        level: f64,
        x_slices: &[f64],
    ) -> Self {
        let per_k = fit
            .fits
            .iter()
            .zip(&fit.weights.weights)
            .map(|(f, &weight)| ManifestResolution {
                k: f.intervals,
                chain_seed: f.chain.seed,
                chib_seed: f.chib_seed,
                acceptance_rate: f.chain.acceptance_rate,
                r: f.chain.r,
                log_marginal: f.marginal.log_marginal,
                weight,
                numerator_samples: f.marginal.numerator_samples,
                denominator_draws: f.marginal.denominator_draws,
                posterior_mean_theta: f.chain.posterior_mean_theta.clone(),
                posterior_mean_phi: f.chain.posterior_mean_phi.clone(),
            })
            .collect();
        Self {
            rng: crate::sampler::RNG_IDENTITY.to_string(),
            degree: config.degree,
            domain: config.domain.clone(),
            iterations: config.iterations,
            burn_in: config.burn_in,
            thin: config.thin,
            seed: config.seed,
            proposal_mode: if config.proposal.adapt {
                "adaptive".to_string()
            } else {
                "fixed".to_string()
            },
            initial_r: config.proposal.initial_r,
            target_acceptance: config.proposal.target_acceptance,
            inversion_tol: config.inversion_tol,
            ordinate_point: match config.ordinate {
                crate::model_select::OrdinatePoint::HighestPosterior => "max".to_string(),
                crate::model_select::OrdinatePoint::Last => "last".to_string(),
            },
            chib_denominator_draws: config.chib_denominator_draws,
            chib_numerator_samples: config.chib_numerator_samples,
            sample_size,
            level,
            x_slices: x_slices.to_vec(),
            eb_k: fit.eb_intervals,
            per_k,
        }
    }
}
