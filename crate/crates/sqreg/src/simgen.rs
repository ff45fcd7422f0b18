//! Synthetic data generators and true-curve evaluators for the two
//! simulation studies.

use crate::model::{Dataset, ModelError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimgenError {
    #[error("study 1 shape parameters must lie in (0,1), got A={a}, B={b}")]
    BadShape { a: f64, b: f64 },
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which of the two curves of the convex combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Xi1,
    Xi2,
}

/// True quantile-function family used to simulate data.
///
/// Study 1 uses the quadratics `(1-A) tau^2 + A tau` and `(1-B) tau^2 + B tau`;
/// study 2 uses `sin(pi tau / 2)` and `log(1+tau)/log 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthSpec {
    Study1 { a: f64, b: f64 },
    Study2,
}

impl TruthSpec {
    /// Study 1 with the reference parameters A = 0.3, B = 0.6.
    pub fn study1_default() -> Self {
        Self::Study1 { a: 0.3, b: 0.6 }
    }

    pub fn validate(&self) -> Result<(), SimgenError> {
        if let Self::Study1 { a, b } = *self {
            if !(0.0 < a && a < 1.0 && 0.0 < b && b < 1.0) {
                return Err(SimgenError::BadShape { a, b });
            }
        }
        Ok(())
    }

    /// True curve value at `tau`.
    pub fn xi(&self, which: Curve, tau: f64) -> f64 {
        match (*self, which) {
            (Self::Study1 { a, .. }, Curve::Xi1) => (1.0 - a) * tau * tau + a * tau,
            (Self::Study1 { b, .. }, Curve::Xi2) => (1.0 - b) * tau * tau + b * tau,
            (Self::Study2, Curve::Xi1) => (std::f64::consts::FRAC_PI_2 * tau).sin(),
            (Self::Study2, Curve::Xi2) => (1.0 + tau).ln() / 2f64.ln(),
        }
    }

    /// True quantile regression function `Q(tau|x)`.
    pub fn qrf(&self, tau: f64, x: f64) -> f64 {
        x * self.xi(Curve::Xi1, tau) + (1.0 - x) * self.xi(Curve::Xi2, tau)
    }

    /// True intercept and slope at `tau`.
    pub fn slope_intercept(&self, tau: f64) -> (f64, f64) {
        let b0 = self.xi(Curve::Xi2, tau);
        (b0, self.xi(Curve::Xi1, tau) - b0)
    }

    /// Simulates `n` observations: X ~ U(0,1), U ~ U(0,1), Y = Q(U|X).
    /// Deterministic given the seed (ChaCha8 stream).
    pub fn generate(&self, n: usize, seed: u64) -> Result<Dataset, SimgenError> {
        self.validate()?;
        if n == 0 {
            return Err(SimgenError::EmptySample);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x: f64 = rng.gen();
            let u: f64 = rng.gen();
            xs.push(x);
            ys.push(self.qrf(u, x));
        }
        Ok(Dataset::new(xs, ys)?)
    }
}
