//! Monotone transformations between raw data scales and the unit interval.
//!
//! Three families: linear range maps, the power-Pareto CDF used for
//! hurricane wind speeds, and log-normal CDFs fitted to positive data.
//! Every transform is a strictly increasing bijection, so quantiles map
//! through it exactly.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("linear transform needs hi > lo, got [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("power-Pareto parameters must be positive, got a={a}, sigma={sigma}, k={k}")]
    BadPareto { a: f64, sigma: f64, k: f64 },
    #[error("log-normal scale must be positive, got {0}")]
    BadLogNormal(f64),
    #[error("row {row}: value {value} outside the domain of the {kind} transform")]
    DomainViolation {
        row: usize,
        value: f64,
        kind: &'static str,
    },
    #[error("log-normal fit needs at least 2 positive values, got {0}")]
    TooFewValues(usize),
    #[error("log-normal fit needs positive values, found {value} at row {row}")]
    NonPositiveValue { row: usize, value: f64 },
    #[error("log-normal fit is degenerate: all values equal")]
    DegenerateFit,
}

/// Direction of application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Power-Pareto CDF `F(y) = 1 - (1 + (y/sigma)^k)^(-a)` for `y > 0`.
pub fn pareto_cdf(y: f64, a: f64, sigma: f64, k: f64) -> Result<f64, TransformError> {
    check_pareto(a, sigma, k)?;
    if !(y > 0.0) {
        return Err(TransformError::DomainViolation {
            row: 0,
            value: y,
            kind: "power-Pareto",
        });
    }
    // stable form of 1 - (1 + (y/sigma)^k)^(-a) near both tails
    Ok(-(-a * (y / sigma).powf(k).ln_1p()).exp_m1())
}

/// Inverse of [`pareto_cdf`]: `sigma ((1-u)^(-1/a) - 1)^(1/k)` on (0,1).
pub fn pareto_quantile(u: f64, a: f64, sigma: f64, k: f64) -> Result<f64, TransformError> {
    check_pareto(a, sigma, k)?;
    if !(0.0 < u && u < 1.0) {
        return Err(TransformError::DomainViolation {
            row: 0,
            value: u,
            kind: "power-Pareto quantile",
        });
    }
    // (1-u)^(-1/a) - 1 = expm1(-ln1p(-u)/a)
    Ok(sigma * (-(-u).ln_1p() / a).exp_m1().powf(1.0 / k))
}

fn check_pareto(a: f64, sigma: f64, k: f64) -> Result<(), TransformError> {
    if !(a > 0.0 && sigma > 0.0 && k > 0.0) {
        return Err(TransformError::BadPareto { a, sigma, k });
    }
    Ok(())
}

/// Maximum-likelihood log-normal fit: mean and population standard
/// deviation of the logs.
pub fn fit_lognormal(values: &[f64]) -> Result<(f64, f64), TransformError> {
    if values.len() < 2 {
        return Err(TransformError::TooFewValues(values.len()));
    }
    for (row, &value) in values.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(TransformError::NonPositiveValue { row, value });
        }
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / logs.len() as f64;
    if var == 0.0 {
        return Err(TransformError::DegenerateFit);
    }
    Ok((mu, var.sqrt()))
}

/// A strictly increasing bijection between a raw scale and (a subset of)
/// the unit interval, serialized to JSON sidecars for later inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitTransform {
    Linear { lo: f64, hi: f64 },
    PowerPareto { a: f64, sigma: f64, k: f64 },
    LogNormal { mu: f64, s: f64 },
}

impl UnitTransform {
    pub fn validate(&self) -> Result<(), TransformError> {
        match *self {
            Self::Linear { lo, hi } => {
                if !(hi > lo) {
                    return Err(TransformError::BadRange { lo, hi });
                }
            }
            Self::PowerPareto { a, sigma, k } => check_pareto(a, sigma, k)?,
            Self::LogNormal { mu: _, s } => {
                if !(s > 0.0) {
                    return Err(TransformError::BadLogNormal(s));
                }
            }
        }
        Ok(())
    }

    /// Fits a log-normal transform to positive raw values.
    pub fn fit_lognormal(values: &[f64]) -> Result<Self, TransformError> {
        let (mu, s) = fit_lognormal(values)?;
        Ok(Self::LogNormal { mu, s })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::PowerPareto { .. } => "power-Pareto",
            Self::LogNormal { .. } => "log-normal",
        }
    }

    /// Forward map onto the unit interval.
    pub fn forward(&self, value: f64) -> Result<f64, TransformError> {
        self.forward_at(value, 0)
    }

    fn forward_at(&self, value: f64, row: usize) -> Result<f64, TransformError> {
        if !value.is_finite() {
            return Err(TransformError::DomainViolation {
                row,
                value,
                kind: self.kind_name(),
            });
        }
        match *self {
            Self::Linear { lo, hi } => {
                if value < lo || value > hi {
                    return Err(TransformError::DomainViolation {
                        row,
                        value,
                        kind: "linear",
                    });
                }
                Ok((value - lo) / (hi - lo))
            }
            Self::PowerPareto { a, sigma, k } => {
                pareto_cdf(value, a, sigma, k).map_err(|e| at_row(e, row))
            }
            Self::LogNormal { mu, s } => {
                if !(value > 0.0) {
                    return Err(TransformError::DomainViolation {
                        row,
                        value,
                        kind: "log-normal",
                    });
                }
                let normal = Normal::new(0.0, 1.0).expect("unit normal");
                Ok(normal.cdf((value.ln() - mu) / s))
            }
        }
    }

    /// Inverse map from the unit interval back to the raw scale.
    pub fn inverse(&self, value: f64) -> Result<f64, TransformError> {
        self.inverse_at(value, 0)
    }

    fn inverse_at(&self, value: f64, row: usize) -> Result<f64, TransformError> {
        match *self {
            Self::Linear { lo, hi } => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(TransformError::DomainViolation {
                        row,
                        value,
                        kind: "linear inverse",
                    });
                }
                Ok(lo + value * (hi - lo))
            }
            Self::PowerPareto { a, sigma, k } => {
                pareto_quantile(value, a, sigma, k).map_err(|e| at_row(e, row))
            }
            Self::LogNormal { mu, s } => {
                if !(0.0 < value && value < 1.0) {
                    return Err(TransformError::DomainViolation {
                        row,
                        value,
                        kind: "log-normal inverse",
                    });
                }
                Ok((mu + s * normal_quantile(value)).exp())
            }
        }
    }

    /// Elementwise application; domain violations carry the offending row.
    pub fn apply(&self, values: &[f64], direction: Direction) -> Result<Vec<f64>, TransformError> {
        self.validate()?;
        values
            .iter()
            .enumerate()
            .map(|(row, &v)| match direction {
                Direction::Forward => self.forward_at(v, row),
                Direction::Inverse => self.inverse_at(v, row),
            })
            .collect()
    }
}

/// Standard normal quantile, polished to full double precision: the
/// rational-approximation start is refined with Newton steps against the
/// erf-based CDF.
fn normal_quantile(p: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut z = normal.inverse_cdf(p);
    for _ in 0..2 {
        let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf <= 0.0 {
            break;
        }
        z -= (normal.cdf(z) - p) / pdf;
    }
    z
}

fn at_row(err: TransformError, row: usize) -> TransformError {
    match err {
        TransformError::DomainViolation { value, kind, .. } => {
            TransformError::DomainViolation { row, value, kind }
        }
        other => other,
    }
}
