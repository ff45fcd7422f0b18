//! Fit the model to simulated data and compare the estimated curves with
//! the truth.
//!
//! Runs one MH chain per knot count, estimates each marginal likelihood,
//! and prints the selection table plus RMISE of the model-averaged curves.
//!
//! ```bash
//! cargo run --release --example fit_quantiles
//! ```

use sqreg::bands::{self, TauGrid};
use sqreg::model_select::{fit_domain, FitConfig};
use sqreg::simgen::TruthSpec;

fn main() {
    let truth = TruthSpec::study1_default();
    let data = truth.generate(100, 7).unwrap();

    let mut config = FitConfig::new(2, 7);
    config.domain = (3..=8).collect();
    config.iterations = 8_000;
    config.burn_in = 2_000;
    config.chib_denominator_draws = 2_000;

    let fit = fit_domain(&data, &config).unwrap();
    println!("   k   log marginal    weight   acceptance");
    for (f, w) in fit.fits.iter().zip(&fit.weights.weights) {
        println!(
            "  {:2}   {:12.3}   {:7.4}   {:.3}",
            f.intervals, f.marginal.log_marginal, w, f.chain.acceptance_rate
        );
    }
    println!("empirical-Bayes choice: k = {}", fit.eb_intervals);

    let grid = TauGrid::standard();
    let chains = fit.weighted_chains();
    for &x in &[0.3, 0.5, 0.7] {
        let estimate = bands::mean_quantile_curve(&chains, x, &grid);
        let reference: Vec<f64> = grid.points().iter().map(|&t| truth.qrf(t, x)).collect();
        println!(
            "RMISE of Q(.|{x}) = {:.4}",
            bands::rmise(&estimate, &reference).unwrap()
        );
    }

    let intercept = bands::mean_xi_curve(&chains, 2, &grid);
    let slope: Vec<f64> = bands::mean_xi_curve(&chains, 1, &grid)
        .iter()
        .zip(&intercept)
        .map(|(a, b)| a - b)
        .collect();
    let truth_b0: Vec<f64> = grid.points().iter().map(|&t| truth.slope_intercept(t).0).collect();
    let truth_b1: Vec<f64> = grid.points().iter().map(|&t| truth.slope_intercept(t).1).collect();
    println!(
        "RMISE intercept = {:.4}, slope = {:.4}",
        bands::rmise(&intercept, &truth_b0).unwrap(),
        bands::rmise(&slope, &truth_b1).unwrap()
    );
}
