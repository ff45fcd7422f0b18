//! The quantile-regression model `Q(tau|x) = x xi1(tau) + (1-x) xi2(tau)`
//! and its exact log-likelihood.
//!
//! Each curve is a monotone spline parameterized by the spacings of its
//! coefficient vector; the spacings live on the unit simplex, so the model
//! state for one curve is a [`SimplexVector`].

use crate::splines::{self, MonotoneSpline, SplineBasis, SplineError, POSITIVITY_FLOOR};
use thiserror::Error;

/// Default inversion tolerance for cubic splines, 2^-10.
pub const DEFAULT_INVERSION_TOL: f64 = 1.0 / 1024.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("simplex entries must be nonnegative (entry {index} = {value})")]
    NegativeSpacing { index: usize, value: f64 },
    #[error("simplex entries sum to {sum}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },
    #[error("simplex vector must be nonempty")]
    Empty,
    #[error("spacing vector has dimension {got}, basis needs {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("dataset row {row}: {name} = {value} outside the unit interval")]
    PointOutOfRange {
        row: usize,
        name: &'static str,
        value: f64,
    },
    #[error("dataset must contain at least one observation")]
    EmptyDataset,
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Spacing vector on the unit simplex; the MCMC state for one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates nonnegativity and normalization (sum within 1e-12 of 1).
    pub fn new(spacings: Vec<f64>) -> Result<Self, ModelError> {
        if spacings.is_empty() {
            return Err(ModelError::Empty);
        }
        for (index, &value) in spacings.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ModelError::NegativeSpacing { index, value });
            }
        }
        let sum: f64 = spacings.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::NotNormalized { sum });
        }
        Ok(Self(spacings))
    }

    /// Normalizes a vector of nonnegative weights onto the simplex.
    pub fn from_unnormalized(mut values: Vec<f64>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::Empty);
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ModelError::NegativeSpacing { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0) {
            return Err(ModelError::NotNormalized { sum });
        }
        for v in &mut values {
            *v /= sum;
        }
        Ok(Self(values))
    }

    /// The uniform-spacing point, the chain's initial state.
    pub fn uniform(dim: usize) -> Self {
        Self(vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min_spacing(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Cumulative sums as monotone spline coefficients: `theta[0] = 0`,
    /// `theta[j+1] = sum of the first j+1 spacings`, last entry forced to
    /// exactly 1 to kill rounding drift.
    pub fn cumulate(&self) -> Vec<f64> {
        let mut coeffs = Vec::with_capacity(self.0.len() + 1);
        coeffs.push(0.0);
        let mut acc = 0.0;
        for &g in &self.0 {
            acc += g;
            coeffs.push(acc);
        }
        *coeffs.last_mut().expect("nonempty") = 1.0;
        coeffs
    }
}

/// Observations on the unit square.
#[derive(Debug, Clone)]
pub struct Dataset {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ModelError> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(ModelError::EmptyDataset);
        }
        for (row, &x) in xs.iter().enumerate() {
            if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                return Err(ModelError::PointOutOfRange {
                    row,
                    name: "x",
                    value: x,
                });
            }
        }
        for (row, &y) in ys.iter().enumerate() {
            if !y.is_finite() || !(0.0..=1.0).contains(&y) {
                return Err(ModelError::PointOutOfRange {
                    row,
                    name: "y",
                    value: y,
                });
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

/// A pair of simplex vectors plus basis metadata; fully determines
/// `Q(tau|x)`. Cumulated coefficients and derivative coefficients are
/// cached at construction; the value is immutable afterwards.
#[derive(Debug, Clone)]
pub struct QuantileModel {
    basis: SplineBasis,
    deriv_basis: SplineBasis,
    gamma: SimplexVector,
    delta: SimplexVector,
    theta: Vec<f64>,
    phi: Vec<f64>,
    dtheta: Vec<f64>,
    dphi: Vec<f64>,
    inversion_tol: f64,
}

impl QuantileModel {
    pub fn new(
        basis: SplineBasis,
        gamma: SimplexVector,
        delta: SimplexVector,
    ) -> Result<Self, ModelError> {
        let expected = basis.spacing_dim();
        for v in [&gamma, &delta] {
            if v.dim() != expected {
                return Err(ModelError::DimensionMismatch {
                    got: v.dim(),
                    expected,
                });
            }
        }
        let theta = gamma.cumulate();
        let phi = delta.cumulate();
        let dtheta = basis.derivative_coefficients(&theta)?;
        let dphi = basis.derivative_coefficients(&phi)?;
        let deriv_basis = basis.derivative_basis()?;
        Ok(Self {
            basis,
            deriv_basis,
            gamma,
            delta,
            theta,
            phi,
            dtheta,
            dphi,
            inversion_tol: DEFAULT_INVERSION_TOL,
        })
    }

    pub fn with_inversion_tol(mut self, tol: f64) -> Self {
        self.inversion_tol = tol;
        self
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    pub fn gamma(&self) -> &SimplexVector {
        &self.gamma
    }

    pub fn delta(&self) -> &SimplexVector {
        &self.delta
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn xi1(&self, tau: f64) -> f64 {
        splines::eval_with(&self.basis, &self.theta, tau)
    }

    pub fn xi2(&self, tau: f64) -> f64 {
        splines::eval_with(&self.basis, &self.phi, tau)
    }

    pub fn xi1_spline(&self) -> MonotoneSpline {
        MonotoneSpline::new(self.basis.clone(), self.theta.clone()).expect("cached coefficients")
    }

    pub fn xi2_spline(&self) -> MonotoneSpline {
        MonotoneSpline::new(self.basis.clone(), self.phi.clone()).expect("cached coefficients")
    }

    /// `Q(tau|x)`, nondecreasing in `tau` with `Q(0|x) = 0`, `Q(1|x) = 1`.
    pub fn quantile(&self, tau: f64, x: f64) -> Result<f64, ModelError> {
        check_unit("tau", tau)?;
        check_unit("x", x)?;
        Ok(x * self.xi1(tau) + (1.0 - x) * self.xi2(tau))
    }

    /// Intercept and slope of the linear quantile regression at `tau`:
    /// `(xi2(tau), xi1(tau) - xi2(tau))`.
    pub fn slope_intercept(&self, tau: f64) -> (f64, f64) {
        let b0 = self.xi2(tau);
        (b0, self.xi1(tau) - b0)
    }

    /// Solves `Q(tau|x) = y`; this is the conditional CDF `F(y|x)`.
    pub fn solve_tau(&self, x: f64, y: f64) -> Result<f64, ModelError> {
        check_unit("x", x)?;
        check_unit("y", y)?;
        let combined: Vec<f64> = self
            .theta
            .iter()
            .zip(&self.phi)
            .map(|(t, p)| x * t + (1.0 - x) * p)
            .collect();
        Ok(splines::invert_coeffs(
            &self.basis,
            &combined,
            y,
            self.inversion_tol,
        ))
    }

    /// Quantile density `dQ/dtau` at `(tau, x)`.
    pub fn quantile_density(&self, tau: f64, x: f64) -> f64 {
        let d1 = splines::eval_with(&self.deriv_basis, &self.dtheta, tau);
        let d2 = splines::eval_with(&self.deriv_basis, &self.dphi, tau);
        x * d1 + (1.0 - x) * d2
    }

    /// Exact log-likelihood of the data under the model. Returns negative
    /// infinity (as a sentinel, not an error) when any spacing or any
    /// quantile density at a solved point falls at or below the positivity
    /// floor.
    pub fn log_likelihood(&self, data: &Dataset) -> f64 {
        let mut evaluator = LikelihoodEvaluator::new(
            self.basis.clone(),
            self.inversion_tol,
        );
        evaluator.log_likelihood(data, &self.gamma, &self.delta)
    }
}

/// Reusable likelihood kernel: owns scratch buffers so the sampler can
/// evaluate thousands of proposals without reallocating.
#[derive(Debug)]
pub struct LikelihoodEvaluator {
    basis: SplineBasis,
    deriv_basis: SplineBasis,
    inversion_tol: f64,
    theta: Vec<f64>,
    phi: Vec<f64>,
    dtheta: Vec<f64>,
    dphi: Vec<f64>,
    combined: Vec<f64>,
}

impl LikelihoodEvaluator {
    pub fn new(basis: SplineBasis, inversion_tol: f64) -> Self {
        let count = basis.basis_count();
        let deriv_basis = basis
            .derivative_basis()
            .expect("bases of degree >= 2 always have a derivative basis");
        Self {
            basis,
            deriv_basis,
            inversion_tol,
            theta: vec![0.0; count],
            phi: vec![0.0; count],
            dtheta: vec![0.0; count - 1],
            dphi: vec![0.0; count - 1],
            combined: vec![0.0; count],
        }
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    /// Log-likelihood of `data` for the model with spacings `(gamma, delta)`,
    /// with the negative-infinity sentinel for floor violations.
    pub fn log_likelihood(
        &mut self,
        data: &Dataset,
        gamma: &SimplexVector,
        delta: &SimplexVector,
    ) -> f64 {
        if gamma.min_spacing() < POSITIVITY_FLOOR || delta.min_spacing() < POSITIVITY_FLOOR {
            return f64::NEG_INFINITY;
        }
        cumulate_into(gamma.as_slice(), &mut self.theta);
        cumulate_into(delta.as_slice(), &mut self.phi);
        derivative_into(&self.basis, &self.theta, &mut self.dtheta);
        derivative_into(&self.basis, &self.phi, &mut self.dphi);

        let mut loglik = 0.0;
        for (x, y) in data.iter() {
            for (c, (t, p)) in self.combined.iter_mut().zip(self.theta.iter().zip(&self.phi)) {
                *c = x * t + (1.0 - x) * p;
            }
            let tau = splines::invert_coeffs(&self.basis, &self.combined, y, self.inversion_tol);
            let d1 = splines::eval_with(&self.deriv_basis, &self.dtheta, tau);
            let d2 = splines::eval_with(&self.deriv_basis, &self.dphi, tau);
            let density = x * d1 + (1.0 - x) * d2;
            if density <= POSITIVITY_FLOOR {
                return f64::NEG_INFINITY;
            }
            loglik -= density.ln();
        }
        loglik
    }
}

fn cumulate_into(spacings: &[f64], out: &mut [f64]) {
    out[0] = 0.0;
    let mut acc = 0.0;
    for (j, &g) in spacings.iter().enumerate() {
        acc += g;
        out[j + 1] = acc;
    }
    out[spacings.len()] = 1.0;
}

fn derivative_into(basis: &SplineBasis, coeffs: &[f64], out: &mut [f64]) {
    let m = basis.degree() as f64;
    let knots = basis.knots();
    for (j, o) in out.iter_mut().enumerate() {
        let span = knots[j + 1 + basis.degree()] - knots[j + 1];
        *o = m * (coeffs[j + 1] - coeffs[j]) / span;
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() {
        return Err(SplineError::NonFinite { name }.into());
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(SplineError::OutOfDomain { name, value }.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_simplex(dim: usize, rng: &mut impl Rng) -> SimplexVector {
        let raw: Vec<f64> = (0..dim).map(|_| -rng.gen::<f64>().ln()).collect();
        SimplexVector::from_unnormalized(raw).unwrap()
    }

    fn identity_model(m: usize, k: usize) -> QuantileModel {
        let basis = SplineBasis::new(m, k).unwrap();
        let greville = basis.greville();
        let spacings: Vec<f64> = greville.windows(2).map(|w| w[1] - w[0]).collect();
        let g = SimplexVector::from_unnormalized(spacings).unwrap();
        QuantileModel::new(basis, g.clone(), g).unwrap()
    }

    /// Exact quadratic-spline representation of a Study-1 curve
    /// `(1-A) tau^2 + A tau` via polar forms of the polynomial.
    fn study1_model(k: usize, a: f64, b: f64) -> QuantileModel {
        let basis = SplineBasis::new(2, k).unwrap();
        let polar = |coef_sq: f64, coef_lin: f64| -> Vec<f64> {
            let knots = basis.knots();
            (0..basis.basis_count())
                .map(|j| {
                    coef_sq * knots[j + 1] * knots[j + 2]
                        + coef_lin * (knots[j + 1] + knots[j + 2]) / 2.0
                })
                .collect()
        };
        let theta = polar(1.0 - a, a);
        let phi = polar(1.0 - b, b);
        let spac = |c: &[f64]| {
            SimplexVector::from_unnormalized(c.windows(2).map(|w| w[1] - w[0]).collect()).unwrap()
        };
        QuantileModel::new(basis, spac(&theta), spac(&phi)).unwrap()
    }

    #[test]
    fn cumulate_degenerate_corner() {
        let g = SimplexVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.cumulate(), vec![0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn cumulate_uniform_is_arithmetic() {
        let g = SimplexVector::uniform(4);
        let theta = g.cumulate();
        for (j, &t) in theta.iter().enumerate() {
            assert_abs_diff_eq!(t, j as f64 / 4.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cumulate_round_trips_spacings() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_simplex(9, &mut rng);
            let theta = g.cumulate();
            for (j, w) in theta.windows(2).enumerate() {
                assert_abs_diff_eq!(w[1] - w[0], g.as_slice()[j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn simplex_rejects_bad_vectors() {
        assert!(SimplexVector::new(vec![]).is_err());
        assert!(SimplexVector::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(SimplexVector::new(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn quantile_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = SplineBasis::new(2, 5).unwrap();
        let model = QuantileModel::new(
            basis.clone(),
            random_simplex(basis.spacing_dim(), &mut rng),
            random_simplex(basis.spacing_dim(), &mut rng),
        )
        .unwrap();
        for &x in &[0.0, 0.4, 1.0] {
            assert_abs_diff_eq!(model.quantile(0.0, x).unwrap(), 0.0);
            assert_abs_diff_eq!(model.quantile(1.0, x).unwrap(), 1.0);
        }
        // convex-combination endpoints
        assert_abs_diff_eq!(model.quantile(0.3, 0.0).unwrap(), model.xi2(0.3));
        assert_abs_diff_eq!(model.quantile(0.3, 1.0).unwrap(), model.xi1(0.3));
    }

    #[test]
    fn study1_quantile_value() {
        // a(0.5) = 0.55, b(0.5) = 0.45: Q(0.5|0.5) = 0.55/4 + 0.45/2
        let model = study1_model(3, 0.3, 0.6);
        assert_abs_diff_eq!(model.quantile(0.5, 0.5).unwrap(), 0.3625, epsilon = 1e-12);
    }

    #[test]
    fn slope_intercept_identities() {
        let model = study1_model(4, 0.3, 0.6);
        let (b0, b1) = model.slope_intercept(0.5);
        assert_abs_diff_eq!(b0, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(b1, -0.075, epsilon = 1e-12);
        let (b0, b1) = model.slope_intercept(1.0);
        assert_abs_diff_eq!(b0 + b1, 1.0, epsilon = 1e-12);

        let identity = identity_model(2, 5);
        for i in 0..=10 {
            let (_, slope) = identity.slope_intercept(i as f64 / 10.0);
            assert_abs_diff_eq!(slope, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn identity_model_has_zero_log_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (m, k) in [(2, 4), (3, 6)] {
            let model = identity_model(m, k);
            let n = rng.gen_range(1..200);
            let xs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let data = Dataset::new(xs, ys).unwrap();
            assert_abs_diff_eq!(model.log_likelihood(&data), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn log_likelihood_matches_closed_form_on_study1() {
        // density at (x, y) is 1 / (2 a(x) tau + b(x)) with tau the positive
        // root of a(x) tau^2 + b(x) tau = y
        let model = study1_model(3, 0.3, 0.6);
        let (x, y): (f64, f64) = (0.4, 0.33);
        let a = x * 0.7 + (1.0 - x) * 0.4;
        let b = x * 0.3 + (1.0 - x) * 0.6;
        let tau = (-b + (b * b + 4.0 * a * y).sqrt()) / (2.0 * a);
        let expected = -(2.0 * a * tau + b).ln();
        let data = Dataset::new(vec![x], vec![y]).unwrap();
        assert_abs_diff_eq!(model.log_likelihood(&data), expected, epsilon = 1e-10);
        // frozen closed-form value for this (x, y)
        assert_abs_diff_eq!(expected, 0.04343296651083088, epsilon = 1e-12);
    }

    #[test]
    fn log_likelihood_doubles_on_duplicated_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = SplineBasis::new(2, 6).unwrap();
        let model = QuantileModel::new(
            basis.clone(),
            random_simplex(basis.spacing_dim(), &mut rng),
            random_simplex(basis.spacing_dim(), &mut rng),
        )
        .unwrap();
        let xs: Vec<f64> = (0..20).map(|_| rng.gen()).collect();
        let ys: Vec<f64> = (0..20).map(|_| rng.gen()).collect();
        let single = Dataset::new(xs.clone(), ys.clone()).unwrap();
        let doubled = Dataset::new(
            xs.iter().chain(&xs).copied().collect(),
            ys.iter().chain(&ys).copied().collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            model.log_likelihood(&doubled),
            2.0 * model.log_likelihood(&single),
            epsilon = 1e-9
        );
    }

    #[test]
    fn floor_violation_returns_negative_infinity() {
        let basis = SplineBasis::new(2, 3).unwrap();
        let dim = basis.spacing_dim();
        let mut v = vec![1.0 / dim as f64; dim];
        v[0] = 1e-13;
        v[1] += 1.0 / dim as f64 - 1e-13;
        let g = SimplexVector::new(v).unwrap();
        let model = QuantileModel::new(basis, g.clone(), SimplexVector::uniform(dim)).unwrap();
        let data = Dataset::new(vec![0.5], vec![0.5]).unwrap();
        assert_eq!(model.log_likelihood(&data), f64::NEG_INFINITY);
    }

    #[test]
    fn boundary_data_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let basis = SplineBasis::new(3, 5).unwrap();
        let model = QuantileModel::new(
            basis.clone(),
            random_simplex(basis.spacing_dim(), &mut rng),
            random_simplex(basis.spacing_dim(), &mut rng),
        )
        .unwrap();
        let data = Dataset::new(vec![0.2, 0.8], vec![0.0, 1.0]).unwrap();
        assert!(model.log_likelihood(&data).is_finite());
    }

    #[test]
    fn dataset_rejects_out_of_range_rows() {
        let err = Dataset::new(vec![0.1, 0.2], vec![0.5, 1.5]).unwrap_err();
        match err {
            ModelError::PointOutOfRange { row, name, value } => {
                assert_eq!(row, 1);
                assert_eq!(name, "y");
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cdf_inverts_quantile() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (m, k) in [(2, 5), (3, 7)] {
            let basis = SplineBasis::new(m, k).unwrap();
            let model = QuantileModel::new(
                basis.clone(),
                random_simplex(basis.spacing_dim(), &mut rng),
                random_simplex(basis.spacing_dim(), &mut rng),
            )
            .unwrap()
            .with_inversion_tol(1e-9);
            for _ in 0..50 {
                let tau: f64 = rng.gen();
                let x: f64 = rng.gen();
                let y = model.quantile(tau, x).unwrap();
                let back = model.solve_tau(x, y).unwrap();
                let there = model.quantile(back, x).unwrap();
                assert!((there - y).abs() <= 2e-9, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // map a tau-grid through Q and trapezoid f(y|x) over the image
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for trial in 0..20 {
            let m = if trial % 2 == 0 { 2 } else { 3 };
            let k = rng.gen_range(2..=8);
            let basis = SplineBasis::new(m, k).unwrap();
            let model = QuantileModel::new(
                basis.clone(),
                random_simplex(basis.spacing_dim(), &mut rng),
                random_simplex(basis.spacing_dim(), &mut rng),
            )
            .unwrap()
            .with_inversion_tol(1e-10);
            for _ in 0..10 {
                let x: f64 = rng.gen();
                let points = 1001;
                let mut integral = 0.0;
                let mut prev: Option<(f64, f64)> = None;
                for i in 0..points {
                    let tau = i as f64 / (points - 1) as f64;
                    let y = model.quantile(tau, x).unwrap();
                    let solved = model.solve_tau(x, y).unwrap();
                    let density = 1.0 / model.quantile_density(solved, x);
                    if let Some((y0, f0)) = prev {
                        integral += 0.5 * (y - y0) * (density + f0);
                    }
                    prev = Some((y, density));
                }
                assert!(
                    (integral - 1.0).abs() < 1e-3,
                    "m={m} k={k} x={x}: integral {integral}"
                );
            }
        }
    }

    #[test]
    fn non_crossing_in_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let basis = SplineBasis::new(2, 7).unwrap();
        let model = QuantileModel::new(
            basis.clone(),
            random_simplex(basis.spacing_dim(), &mut rng),
            random_simplex(basis.spacing_dim(), &mut rng),
        )
        .unwrap();
        // linearity in x means checking the extreme covariates suffices
        for &x in &[0.0, 1.0] {
            let mut prev = 0.0;
            for i in 1..=101 {
                let q = model.quantile(i as f64 / 101.0, x).unwrap();
                assert!(q >= prev);
                prev = q;
            }
        }
    }
}
