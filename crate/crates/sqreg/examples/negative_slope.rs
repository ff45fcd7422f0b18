//! Posterior probability that the slope of the quantile regression is
//! negative, as a function of the quantile level.
//!
//! The generating truth here has xi1 below xi2 for low quantiles and above
//! for high ones, so the probability curve should fall from near 1 toward 0.
//!
//! ```bash
//! cargo run --release --example negative_slope
//! ```

use sqreg::bands::{neg_slope_prob, TauGrid};
use sqreg::model_select::{fit_domain, FitConfig};
use sqreg::simgen::TruthSpec;

fn main() {
    // A = 0.3 < B = 0.6 makes the slope xi1 - xi2 negative for tau < 1
    let truth = TruthSpec::Study1 { a: 0.3, b: 0.6 };
    let data = truth.generate(150, 55).unwrap();

    let mut config = FitConfig::new(2, 55);
    config.domain = (3..=6).collect();
    config.iterations = 6_000;
    config.burn_in = 2_000;
    config.chib_denominator_draws = 1_000;
    let fit = fit_domain(&data, &config).unwrap();

    let grid = TauGrid::standard();
    let prob = neg_slope_prob(&fit.weighted_chains(), &grid);
    println!("  tau   P(slope < 0)   true slope");
    for i in (5..=95).step_by(10) {
        let tau = grid.points()[i];
        let (_, slope) = truth.slope_intercept(tau);
        println!("  {tau:.2}      {:.3}        {slope:+.4}", prob[i]);
    }
}
