//! A small replicated coverage experiment: how often does the true curve
//! stay inside the raw and inflated uniform bands?
//!
//! The reference protocol uses 1000 replications; this walkthrough runs 20
//! so it finishes in about a minute.
//!
//! ```bash
//! cargo run --release --example coverage_study
//! ```

use sqreg::bands::{coverage_experiment, Method};
use sqreg::model_select::FitConfig;
use sqreg::simgen::TruthSpec;

fn main() {
    let mut fit = FitConfig::new(2, 0);
    fit.domain = (3..=6).collect();
    fit.iterations = 4_000;
    fit.burn_in = 1_500;
    fit.chib_denominator_draws = 500;

    let report = coverage_experiment(
        &TruthSpec::study1_default(),
        50,
        20,
        Method::Hb,
        &[0.2, 0.5, 0.7],
        &fit,
        0.95,
        99,
    )
    .unwrap();

    println!(
        "{} replications at n = {} ({:?})",
        report.replications, report.sample_size, report.method
    );
    println!("   x    raw coverage  inflated  mean radius  mean inflated");
    for at_x in &report.per_x {
        println!(
            "  {:.1}      {:.2}        {:.2}      {:.4}       {:.4}",
            at_x.x,
            at_x.raw_coverage,
            at_x.inflated_coverage,
            at_x.mean_radius,
            at_x.mean_inflated_radius
        );
    }
}
