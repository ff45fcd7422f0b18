//! Empirical-Bayes selection versus hierarchical-Bayes model averaging on
//! the non-polynomial truth of the second study.
//!
//! ```bash
//! cargo run --release --example model_averaging
//! ```

use sqreg::bands::{self, TauGrid};
use sqreg::model_select::{fit_domain, FitConfig};
use sqreg::simgen::TruthSpec;

fn main() {
    let truth = TruthSpec::Study2;
    let data = truth.generate(100, 23).unwrap();

    let mut config = FitConfig::new(2, 23);
    config.domain = (3..=8).collect();
    config.iterations = 8_000;
    config.burn_in = 2_000;
    config.chib_denominator_draws = 2_000;
    let fit = fit_domain(&data, &config).unwrap();

    println!("weights over k:");
    for (k, w) in fit.weights.domain.iter().zip(&fit.weights.weights) {
        println!("  k = {k}: {w:.4}");
    }
    println!("EB picks k = {}", fit.eb_intervals);

    let grid = TauGrid::standard();
    let reference: Vec<f64> = grid.points().iter().map(|&t| truth.qrf(t, 0.5)).collect();

    let hb = bands::mean_quantile_curve(&fit.weighted_chains(), 0.5, &grid);
    let eb = bands::mean_quantile_curve(&[(&fit.eb_fit().chain, 1.0)], 0.5, &grid);
    println!(
        "RMISE at x = 0.5: HB {:.4}, EB {:.4}",
        bands::rmise(&hb, &reference).unwrap(),
        bands::rmise(&eb, &reference).unwrap()
    );
}
